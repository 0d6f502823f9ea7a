"""Physical constants, experiment configuration and the config file format.

Internally everything is SI with angular frequencies in rad/s.  Config files
use lab units (MHz for Omega/2pi, GHz, us, um, uK, nm, T) and are converted on
load by the exact factors in :func:`mhz` and friends.

Config files are line oriented::

    # comment
    level.n = 150          # principal quantum number
    laser.rabi_mhz = 30    # two-photon Omega/2pi

Unknown keys, duplicate keys and missing required keys are errors.  The
complete key list with units lives in :data:`SCHEMA`.
"""

from __future__ import annotations

import hashlib
import math
import os
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import scipy.constants as sc

from .blockade import BlockadeModel, Constant, Table, VanDerWaals, blockade_shift
from .errors import ConfigError

TWO_PI = 2.0 * math.pi
CONFIG_PATH_ENV = "RYDGATE_CONFIG_PATH"


def mhz(x):
    """Convert a frequency in MHz (cycles) to rad/s."""
    return TWO_PI * 1e6 * x


def ghz(x):
    return TWO_PI * 1e9 * x


def to_mhz(omega):
    return omega / (TWO_PI * 1e6)


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = sc.hbar
    k_B: float = sc.k
    mu_B: float = sc.physical_constants["Bohr magneton"][0]
    amu: float = sc.physical_constants["atomic mass constant"][0]


CONSTANTS = PhysicalConstants()

# Rb ns_1/2 room-temperature radiative lifetimes (s); no other levels are tabulated.
RB_NS_LIFETIMES = {75: 180e-6, 100: 340e-6, 125: 570e-6, 150: 860e-6}


def lande_g(l: int, j: float) -> float:
    """Fine-structure Lande factor with g_s = 2.

    >>> lande_g(0, 0.5)
    2.0
    """
    if int(l) != l or l < 0:
        raise ValueError(f"l must be a non-negative integer, got {l}")
    if not any(math.isclose(j, l + s) for s in (-0.5, 0.5)) or j <= 0:
        raise ValueError(f"j = {j} is not l +/- 1/2 for l = {l}")
    return 1.0 + (j * (j + 1) + 0.75 - l * (l + 1)) / (2 * j * (j + 1))


def two_photon_wavenumber(lambda_1: float, lambda_2: float, geometry: str = "co") -> float:
    """Effective two-photon wavenumber (1/m) for wavelengths in metres.

    ``co``: |k1 - k2|; ``counter``: k1 + k2.
    """
    if not (lambda_1 > 0 and lambda_2 > 0):
        raise ValueError("wavelengths must be positive")
    k1, k2 = TWO_PI / lambda_1, TWO_PI / lambda_2
    if geometry == "co":
        return abs(k1 - k2)
    if geometry == "counter":
        return k1 + k2
    raise ValueError(f"geometry must be 'co' or 'counter', got {geometry!r}")


@dataclass(frozen=True)
class AtomSpecies:
    name: str
    mass: float  # kg
    omega_hf: float  # rad/s
    gm_ground: float = 0.0  # g_g * m_fg of the ground qubit state

    def __post_init__(self):
        if not self.mass > 0:
            raise ConfigError("species.mass_amu", "mass must be > 0")
        if not self.omega_hf > 0:
            raise ConfigError("species.hf_ghz", "hyperfine splitting must be > 0")


RB87 = AtomSpecies("Rb87", 86.909180527 * CONSTANTS.amu, ghz(6.834682610904), 0.0)


@dataclass(frozen=True)
class RydbergLevel:
    n: int
    l: int
    j: float
    m_j: float
    tau: float  # s
    g: float

    def __post_init__(self):
        if self.n < 10:
            raise ConfigError("level.n", f"n must be >= 10, got {self.n}")
        if not self.tau > 0:
            raise ConfigError("level.tau_us", "lifetime must be > 0")
        if abs(self.m_j) > self.j:
            raise ConfigError("level.m_j", f"|m_j| must not exceed j = {self.j}")

    @property
    def gm(self):
        return self.g * self.m_j


@dataclass(frozen=True)
class LaserExcitation:
    omega: float  # two-photon Rabi, rad/s
    omega_1: float  # single-photon Rabi, rad/s
    gamma_p: float  # intermediate-state decay rate, 1/s
    delta: float  # intermediate detuning, rad/s
    lambda_1: float  # m
    lambda_2: float  # m
    geometry: str = "co"

    def __post_init__(self):
        if not self.omega > 0:
            raise ConfigError("laser.rabi_mhz", "Omega must be > 0")
        if not self.omega_1 > 0:
            raise ConfigError("laser.rabi1_mhz", "Omega_1 must be > 0")
        if not self.gamma_p > 0:
            raise ConfigError("laser.intermediate_lifetime_ns", "lifetime must be > 0")
        if self.geometry not in ("co", "counter"):
            raise ConfigError("laser.geometry", f"expected 'co' or 'counter', got {self.geometry!r}")
        if not (self.lambda_1 > 0 and self.lambda_2 > 0):
            raise ConfigError("laser.lambda_1_nm", "wavelengths must be > 0")
        if abs(self.delta) < 10 * self.gamma_p:
            warnings.warn("intermediate detuning is not large compared to gamma_p", stacklevel=2)

    @property
    def k_2nu(self):
        return two_photon_wavenumber(self.lambda_1, self.lambda_2, self.geometry)


@dataclass(frozen=True)
class Environment:
    temperature: float  # K
    sigma: float  # T, rms quasi-static field
    gap_time: float | None  # s; None means the minimum gap 2 pi / Omega
    loss_prob: float = 0.0  # per atom per stage
    loss_stages: int = 1

    def __post_init__(self):
        if not self.temperature >= 0:
            raise ConfigError("environment.temperature_uk", "temperature must be >= 0")
        if not self.sigma >= 0:
            raise ConfigError("environment.sigma_tesla", "sigma must be >= 0")
        if self.gap_time is not None and not self.gap_time >= 0:
            raise ConfigError("environment.gap_us", "gap time must be >= 0")
        if not 0 <= self.loss_prob < 1:
            raise ConfigError("environment.loss_prob", "loss probability must be in [0, 1)")
        if self.loss_stages < 0:
            raise ConfigError("environment.loss_stages", "must be >= 0")


@dataclass(frozen=True)
class ExperimentConfig:
    species: AtomSpecies
    level: RydbergLevel
    laser: LaserExcitation
    environment: Environment
    R: float  # m
    blockade: BlockadeModel
    constants: PhysicalConstants = CONSTANTS
    values: tuple = field(default=(), compare=False)  # (key, raw value) pairs, for dumping
    defaulted: tuple = field(default=(), compare=False)  # keys filled from defaults

    @property
    def B(self):
        return blockade_shift(self.blockade, self.R)

    @property
    def k_2nu(self):
        return self.laser.k_2nu

    @property
    def delta_gm(self):
        """|g_R m_jR - g_g m_fg|, the differential Zeeman coefficient in Bohr magnetons."""
        return abs(self.level.gm - self.species.gm_ground)

    def get(self, key):
        return dict(self.values)[key]

    def sha256(self):
        return hashlib.sha256(dump_config(self).encode()).hexdigest()

    def with_overrides(self, overrides):
        """Re-validate with ``overrides`` (mapping of dotted key -> raw value) applied."""
        raw = dict(self.values)
        for k in self.defaulted:
            raw.pop(k, None)
        raw.update({k: str(v) for k, v in dict(overrides).items()})
        return build_config(raw, base_dir=_base_dir(self))


def _base_dir(cfg):
    return dict(cfg.values).get("_base_dir")


# ---------------------------------------------------------------- schema

@dataclass(frozen=True)
class Key:
    name: str
    parse: Callable[[str], Any]
    unit: str
    doc: str
    default: Any = None  # None: required unless optional
    optional: bool = False


def _float(s):
    return float(s)


def _int(s):
    v = float(s)
    if v != int(v):
        raise ValueError(f"{s!r} is not an integer")
    return int(v)


def _half_int(s):
    v = float(s) if "/" not in s else float(s.split("/")[0]) / float(s.split("/")[1])
    if not math.isclose(2 * v, round(2 * v)):
        raise ValueError(f"{s!r} is not a half-integer")
    return v


def _choice(*opts):
    def parse(s):
        if s not in opts:
            raise ValueError(f"expected one of {opts}, got {s!r}")
        return s
    return parse


# Default van der Waals model, anchored at the 150s_1/2 operating point: B(5 um)
# is the shift at which the closed-form minimum error equals 5.5e-5 for
# tau = 860 us, i.e. B tau = (3 (7 pi)^(2/3) / (8 * 5.5e-5))^(3/2); B/2pi = 2.291 GHz.
# budget.blockade_from_emin performs the same inversion.
ANCHOR_150S = {"E_min": 5.5e-5, "tau": 860e-6, "R": 5e-6}
ANCHOR_150S["B"] = (3 * (7 * math.pi) ** (2 / 3) / (8 * ANCHOR_150S["E_min"])) ** 1.5 / ANCHOR_150S["tau"]
DEFAULT_C6_GHZ_UM6 = ANCHOR_150S["B"] / (TWO_PI * 1e9) * (ANCHOR_150S["R"] * 1e6) ** 6

SCHEMA = [
    Key("species.name", str, "", "species label", "Rb87"),
    Key("species.mass_amu", _float, "u", "atomic mass", 86.909180527),
    Key("species.hf_ghz", _float, "GHz", "ground hyperfine splitting omega_hf/2pi", 6.834682610904),
    Key("species.gm_ground", _float, "", "g_g * m_fg of the ground qubit state", 0.0),
    Key("level.n", _int, "", "Rydberg principal quantum number"),
    Key("level.l", _int, "", "orbital angular momentum", 0),
    Key("level.j", _half_int, "", "total electronic angular momentum", 0.5),
    Key("level.m_j", _half_int, "", "magnetic quantum number (default: j)", None, optional=True),
    Key("level.tau_us", _float, "us", "radiative lifetime (tabulated for Rb ns_1/2, n=75..150)", None, optional=True),
    Key("level.g", _float, "", "override of the Lande factor (must agree within 1%)", None, optional=True),
    Key("laser.rabi_mhz", _float, "MHz", "two-photon Rabi frequency Omega/2pi"),
    Key("laser.rabi1_mhz", _float, "MHz", "single-photon Rabi Omega_1/2pi (default sqrt(2 Delta Omega))", None, optional=True),
    Key("laser.detuning_ghz", _float, "GHz", "intermediate-state detuning Delta/2pi", 37.0),
    Key("laser.intermediate_lifetime_ns", _float, "ns", "intermediate p-level lifetime 1/gamma_p", 27.7),
    Key("laser.lambda_1_nm", _float, "nm", "first excitation wavelength", 480.0),
    Key("laser.lambda_2_nm", _float, "nm", "second excitation wavelength", 780.0),
    Key("laser.geometry", _choice("co", "counter"), "", "beam geometry", "co"),
    Key("environment.temperature_uk", _float, "uK", "atom temperature", 60.0),
    Key("environment.sigma_tesla", _float, "T", "rms quasi-static magnetic field noise", 2.5e-6),
    Key("environment.gap_us", _float, "us", "Rydberg gap time (default 2 pi / Omega)", None, optional=True),
    Key("environment.loss_prob", _float, "", "atom loss probability per atom per stage", 0.0),
    Key("environment.loss_stages", _int, "", "number of trap-drop stages", 1),
    Key("geometry.r_um", _float, "um", "atom separation", 5.0),
    Key("blockade.model", _choice("constant", "vdw", "table"), "", "blockade model", "vdw"),
    Key("blockade.b_mhz", _float, "MHz", "B/2pi for the constant model", None, optional=True),
    Key("blockade.c6_ghz_um6", _float, "GHz um^6", "C6/2pi for the van der Waals model", DEFAULT_C6_GHZ_UM6),
    Key("blockade.table_csv", str, "", "CSV of (R um, B/2pi MHz) for the table model", None, optional=True),
]
KEYS = {k.name: k for k in SCHEMA}


def parse_config_text(text, source="<string>"):
    """Parse config text into an ordered dict of raw string values."""
    raw = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(None, f"{source}:{line_no}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(key, f"{source}:{line_no}: duplicate key")
        raw[key] = value
    return raw


def build_config(raw, base_dir=None) -> ExperimentConfig:
    """Validate raw ``{key: str}`` values and construct an :class:`ExperimentConfig`."""
    raw = {k: str(v) for k, v in raw.items() if k != "_base_dir"}
    unknown = sorted(set(raw) - set(KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown config key")

    v, defaulted = {}, []
    for key in SCHEMA:
        if key.name in raw:
            try:
                v[key.name] = key.parse(raw[key.name])
            except ValueError as exc:
                raise ConfigError(key.name, f"unparseable value {raw[key.name]!r} ({exc})") from None
        elif key.default is not None:
            v[key.name] = key.default
            defaulted.append(key.name)
        elif key.optional:
            v[key.name] = None
        else:
            raise ConfigError(key.name, "missing required key")

    c = CONSTANTS
    species = AtomSpecies(
        v["species.name"], v["species.mass_amu"] * c.amu, ghz(v["species.hf_ghz"]), v["species.gm_ground"]
    )

    n, l, j = v["level.n"], v["level.l"], v["level.j"]
    try:
        g_lande = lande_g(l, j)
    except ValueError as exc:
        raise ConfigError("level.j", str(exc)) from None
    g = g_lande
    if v["level.g"] is not None:
        if not math.isclose(v["level.g"], g_lande, rel_tol=0.01):
            raise ConfigError("level.g", f"override {v['level.g']} disagrees with Lande value {g_lande:.6g}")
        g = v["level.g"]
    tau_us = v["level.tau_us"]
    if tau_us is None:
        if species.name == "Rb87" and l == 0 and j == 0.5 and n in RB_NS_LIFETIMES:
            tau_us = RB_NS_LIFETIMES[n] * 1e6
            defaulted.append("level.tau_us")
        else:
            raise ConfigError("level.tau_us", f"no tabulated lifetime for n={n}, l={l}, j={j}; give it explicitly")
    tau = RB_NS_LIFETIMES[n] if "level.tau_us" in defaulted else tau_us * 1e-6
    m_j = v["level.m_j"] if v["level.m_j"] is not None else j
    level = RydbergLevel(n, l, j, m_j, tau, g)

    omega = mhz(v["laser.rabi_mhz"])
    if not omega > 0:
        raise ConfigError("laser.rabi_mhz", "Omega must be > 0")
    delta = ghz(v["laser.detuning_ghz"])
    if v["laser.rabi1_mhz"] is not None:
        omega_1 = mhz(v["laser.rabi1_mhz"])
    else:
        omega_1 = math.sqrt(2 * abs(delta) * omega)
    laser = LaserExcitation(
        omega=omega,
        omega_1=omega_1,
        gamma_p=1.0 / (v["laser.intermediate_lifetime_ns"] * 1e-9),
        delta=delta,
        lambda_1=v["laser.lambda_1_nm"] * 1e-9,
        lambda_2=v["laser.lambda_2_nm"] * 1e-9,
        geometry=v["laser.geometry"],
    )

    gap = v["environment.gap_us"]
    env = Environment(
        temperature=v["environment.temperature_uk"] * 1e-6,
        sigma=v["environment.sigma_tesla"],
        gap_time=None if gap is None else gap * 1e-6,
        loss_prob=v["environment.loss_prob"],
        loss_stages=v["environment.loss_stages"],
    )

    R = v["geometry.r_um"] * 1e-6
    if not R > 0:
        raise ConfigError("geometry.r_um", "separation must be > 0")

    model = v["blockade.model"]
    if model == "constant":
        if v["blockade.b_mhz"] is None:
            raise ConfigError("blockade.b_mhz", "missing required key for the constant model")
        blockade = Constant(mhz(v["blockade.b_mhz"]))
    elif model == "vdw":
        blockade = VanDerWaals(TWO_PI * 1e9 * v["blockade.c6_ghz_um6"] * 1e-36)
    else:
        path = v["blockade.table_csv"]
        if path is None:
            raise ConfigError("blockade.table_csv", "missing required key for the table model")
        path = Path(path)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        if not path.exists():
            raise ConfigError("blockade.table_csv", f"file not found: {path}")
        blockade = Table.from_csv(path)

    values = tuple((k.name, raw[k.name] if k.name in raw else _fmt(v[k.name]))
                   for k in SCHEMA if v[k.name] is not None)
    if base_dir is not None:
        values += (("_base_dir", str(base_dir)),)
    cfg = ExperimentConfig(species, level, laser, env, R, blockade, c, values, tuple(defaulted))
    # evaluate once so an out-of-range table fails at load time
    try:
        cfg.B
    except Exception as exc:
        raise ConfigError("geometry.r_um", str(exc)) from None
    return cfg


def _fmt(x):
    return repr(x) if isinstance(x, float) else str(x)


def find_config(path) -> Path:
    """Resolve a config path: as given, then in ``$RYDGATE_CONFIG_PATH``, then built-ins.

    Built-in configs may be named without the ``.cfg`` suffix.
    """
    p = Path(path)
    if p.exists():
        return p
    if not p.is_absolute():
        dirs = [d for d in os.environ.get(CONFIG_PATH_ENV, "").split(os.pathsep) if d]
        dirs.append(str(resources.files("rydgate") / "configs"))
        for d in dirs:
            for name in (p, p.with_name(p.name + ".cfg")):
                cand = Path(d) / name
                if cand.exists():
                    return cand
    raise ConfigError(None, f"config file not found: {path}")


def load_config(path) -> ExperimentConfig:
    """Load, validate and derive a config from ``path`` (see :func:`find_config`)."""
    p = find_config(path)
    raw = parse_config_text(p.read_text(), source=str(p))
    return build_config(raw, base_dir=p.parent)


def loads_config(text, base_dir=None) -> ExperimentConfig:
    return build_config(parse_config_text(text), base_dir=base_dir)


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialize explicitly set and defaulted keys; reparses to an equal config."""
    lines = []
    values = dict(cfg.values)
    for key in SCHEMA:
        if key.name not in values:
            continue
        unit = f"  # [{key.unit}] {key.doc}" if key.unit else f"  # {key.doc}"
        lines.append(f"{key.name} = {values[key.name]}{unit}")
    return "\n".join(lines) + "\n"


def schema_doc() -> str:
    """Human-readable key list, one line per key."""
    out = []
    for k in SCHEMA:
        req = "required" if k.default is None and not k.optional else (
            "optional" if k.default is None else f"default {k.default}")
        out.append(f"{k.name:32s} [{k.unit or '-'}] {k.doc} ({req})")
    return "\n".join(out)

