"""Two-atom density-matrix simulation of blockade gate protocols.

Each atom has the levels ``0, 1, r, d`` (indices 0..3); ``d`` is an absorbing
sink collecting radiative decay out of ``r``.  Two-atom states are ordered
``|control, target>`` with index ``4 * control + target``, so the computational
basis ``00, 01, 10, 11`` sits at indices 0, 1, 4, 5.

A pulse drives its addressed transition (``1r`` or ``0r``) resonantly at
Omega/2.  The other qubit state (the spectator) couples to ``r`` with the same
amplitude but detuned by omega_hf; that spectator energy is held in the
Hamiltonian during the pulse and removed again afterwards, so results are
reported in the qubit frame.  ``B = inf`` means perfect blockade: every
coupling into ``|rr>`` is dropped.  ``omega_hf = inf`` switches off the
spectator channel and ``tau = inf`` switches off decay.

Piecewise-constant generators are propagated with exact exponentials of the
Lindblad superoperator over a fixed step, so the result is norm preserving
and completely positive whatever the step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .blockade import blockade_shift
from .errors import StepTooCoarseError

TWO_PI = 2.0 * math.pi
LEVELS = ("0", "1", "r", "d")
G0, G1, R, D = range(4)
DIM = 16
COMPUTATIONAL = np.array([0, 1, 4, 5])
COMPUTATIONAL_LABELS = ("00", "01", "10", "11")
RR = 4 * R + R
ATOMS = {"control": (0,), "target": (1,), "both": (0, 1)}
_SWAP_ROLES = {"control": "target", "target": "control", "both": "both"}


def index(control: int, target: int) -> int:
    return 4 * control + target


# --------------------------------------------------------------- parameters

@dataclass(frozen=True)
class GateParams:
    """Rates entering the gate Hamiltonian (all rad/s, tau in s)."""

    omega: float
    B: float
    tau: float
    omega_hf: float

    @classmethod
    def from_config(cls, config):
        return cls(config.laser.omega, blockade_shift(config.blockade, config.R),
                   config.level.tau, config.species.omega_hf)

    def ideal(self):
        """Perfect blockade, no decay, no spectator coupling."""
        return replace(self, B=math.inf, tau=math.inf, omega_hf=math.inf)


def as_params(config) -> GateParams:
    return config if isinstance(config, GateParams) else GateParams.from_config(config)


# ----------------------------------------------------------------- sequence

@dataclass(frozen=True)
class Pulse:
    """Resonant-frame Rabi drive of ``area`` (rad) on the ``atom`` role.

    ``omega=None`` uses the Rabi frequency of the gate parameters.
    """

    atom: str
    transition: str
    area: float
    omega: float | None = None
    detuning: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.atom not in ATOMS:
            raise ValueError(f"atom must be one of {tuple(ATOMS)}, got {self.atom!r}")
        if self.transition not in ("1r", "0r"):
            raise ValueError(f"transition must be '1r' or '0r', got {self.transition!r}")
        if not self.area > 0:
            raise ValueError("pulse area must be > 0")
        if self.omega is not None and not self.omega > 0:
            raise ValueError("Rabi frequency must be > 0")

    def rabi(self, params):
        return self.omega if self.omega is not None else params.omega

    def duration(self, params):
        return self.area / self.rabi(params)


@dataclass(frozen=True)
class Gap:
    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("gap duration must be > 0")


@dataclass(frozen=True)
class QubitRotation:
    """Instantaneous ideal rotation exp(-i theta/2 (cos phi X + sin phi Y)) of one qubit.

    ``z`` adds a virtual phase diag(1, e^{i z}) applied before the rotation.
    Levels ``r`` and ``d`` are untouched.
    """

    atom: str
    theta: float
    phi: float = 0.0
    z: float = 0.0

    def matrix(self):
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        rot = np.array([[c, -1j * s * np.exp(-1j * self.phi)],
                        [-1j * s * np.exp(1j * self.phi), c]])
        return rot @ np.diag([1.0, np.exp(1j * self.z)])


@dataclass(frozen=True)
class PulseSequence:
    """Ordered steps plus the 4x4 computational map expected in the ideal limit."""

    steps: tuple
    name: str = ""
    ideal_map: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.steps:
            raise ValueError("sequence must not be empty")

    def swapped_roles(self):
        """Same sequence with the control and target atoms exchanged."""
        steps = tuple(replace(s, atom=_SWAP_ROLES[s.atom]) if hasattr(s, "atom") else s for s in self.steps)
        ideal = None if self.ideal_map is None else SWAP4 @ self.ideal_map @ SWAP4
        return PulseSequence(steps, self.name + "-swapped", ideal)

    def with_gaps(self, gap):
        """Insert a gap of ``gap`` seconds between consecutive pulses."""
        steps = []
        for s in self.steps:
            if steps and isinstance(s, Pulse) and isinstance(steps[-1], Pulse):
                steps.append(Gap(gap))
            steps.append(s)
        return PulseSequence(tuple(steps), self.name, self.ideal_map)

    def duration(self, params):
        p = as_params(params)
        return sum(s.duration(p) if isinstance(s, Pulse) else s.duration if isinstance(s, Gap) else 0.0
                   for s in self.steps)

    def to_text(self):
        """One line per step: ``kind key=value ...``."""
        lines = [f"# sequence {self.name}"]
        for s in self.steps:
            kind = type(s).__name__
            body = " ".join(f"{k}={v!r}" for k, v in s.__dict__.items())
            lines.append(f"{kind} {body}")
        return "\n".join(lines) + "\n"


SWAP4 = np.eye(4)[[0, 2, 1, 3]]


def cz_sequence(config=None) -> PulseSequence:
    """pi (control) - 2 pi (target) - pi (control), all on 1 <-> r."""
    steps = (Pulse("control", "1r", math.pi), Pulse("target", "1r", 2 * math.pi), Pulse("control", "1r", math.pi))
    return PulseSequence(steps, "cz", np.diag([1.0, -1.0, -1.0, -1.0]).astype(complex))


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def cnot_hadamard_variant(config=None) -> PulseSequence:
    """C_Z wrapped in ideal pi/2 rotations of the target qubit.

    With the C_Z map diag(1,-1,-1,-1) the target sees Z (control 0) or -1
    (control 1); R_y(pi/2) before and R_y(-pi/2) Z after turn this into
    -i * CNOT.
    """
    cz = cz_sequence()
    steps = (QubitRotation("target", math.pi / 2, math.pi / 2),) + cz.steps + (
        QubitRotation("target", math.pi / 2, -math.pi / 2, z=math.pi),)
    return PulseSequence(steps, "cnot-h", -1j * CNOT)


def amplitude_swap(config=None) -> PulseSequence:
    """Blockade amplitude swap: target amplitudes 0 <-> 1 exchanged through r
    unless the control sits in r.

    Ideal map: control 0 -> target gets -X; control 1 -> -identity, i.e. a
    NOT conditioned on the control being 0.
    """
    steps = (Pulse("control", "1r", math.pi), Pulse("target", "0r", math.pi), Pulse("target", "1r", math.pi),
             Pulse("target", "0r", math.pi), Pulse("control", "1r", math.pi))
    ideal = -np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex)
    return PulseSequence(steps, "swap", ideal)


def cnot_amplitude_swap(config=None) -> PulseSequence:
    """:func:`amplitude_swap` followed by an ideal X (pi) rotation of the target,
    giving i * CNOT."""
    steps = amplitude_swap().steps + (QubitRotation("target", math.pi, 0.0),)
    return PulseSequence(steps, "cnot-swap", 1j * CNOT)


SEQUENCES = {"cz": cz_sequence, "cnot-h": cnot_hadamard_variant, "cnot-swap": cnot_amplitude_swap,
             "swap": amplitude_swap}


# -------------------------------------------------------------- hamiltonian

def _op(i, j):
    m = np.zeros((4, 4), dtype=complex)
    m[i, j] = 1.0
    return m


def embed(single, atom):
    """Lift a 4x4 single-atom operator onto atom 0 (control) or 1 (target)."""
    eye = np.eye(4)
    return np.kron(single, eye) if atom == 0 else np.kron(eye, single)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Two-atom Hamiltonian for one pulse (rad/s) and its frame bookkeeping.

    ``frame`` holds the diagonal spectator energies that are undone after the
    pulse; ``max_frequency`` is the spectral width used for step checks.
    """

    H: np.ndarray
    frame: np.ndarray
    blockade: float
    perfect_blockade: bool
    max_frequency: float


def build_hamiltonian(config, pulse: Pulse | None) -> HamiltonianSpec:
    p = as_params(config)
    H = np.zeros((DIM, DIM), dtype=complex)
    frame = np.zeros(DIM)
    perfect = math.isinf(p.B)
    if pulse is not None:
        W = pulse.rabi(p)
        addressed = G1 if pulse.transition == "1r" else G0
        spectator = G0 if addressed == G1 else G1
        drive = 0.5 * W * np.exp(1j * pulse.phase) * _op(R, addressed)
        single = drive + drive.conj().T - pulse.detuning * _op(R, R)
        spect_frame = np.zeros(4)
        if math.isfinite(p.omega_hf):
            sd = 0.5 * W * np.exp(1j * pulse.phase) * _op(R, spectator)
            single = single + sd + sd.conj().T
            spect_frame[spectator] = -p.omega_hf if spectator == G0 else p.omega_hf
            single = single + np.diag(spect_frame)
        for a in ATOMS[pulse.atom]:
            H += embed(single, a)
            frame += np.kron(spect_frame, np.ones(4)) if a == 0 else np.kron(np.ones(4), spect_frame)
    if perfect:
        keep = H[RR, RR]
        H[RR, :] = 0.0
        H[:, RR] = 0.0
        H[RR, RR] = keep
    else:
        H[RR, RR] += p.B
    ev = np.linalg.eigvalsh(H)
    return HamiltonianSpec(H, frame, p.B, perfect, float(ev[-1] - ev[0]))


# ---------------------------------------------------------------- evolution

def liouvillian(H, tau):
    """Row-major Lindblad superoperator with decay r -> d at rate 1/tau per atom."""
    eye = np.eye(DIM)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    if math.isfinite(tau):
        for a in (0, 1):
            J = embed(_op(D, R), a) / math.sqrt(tau)
            JdJ = J.conj().T @ J
            L += np.kron(J, J.conj()) - 0.5 * np.kron(JdJ, eye) - 0.5 * np.kron(eye, JdJ.T)
    return L


def default_step(params, pulse=None, duration=None):
    """min(2 pi / (50 f_max), duration / 100), f_max the largest finite rate in play."""
    p = as_params(params)
    rates = [p.omega]
    if pulse is not None:
        rates += [pulse.rabi(p), abs(pulse.detuning)]
        if math.isfinite(p.omega_hf):
            rates.append(p.omega_hf)
    if math.isfinite(p.B):
        rates.append(p.B)
    step = TWO_PI / (50 * max(rates))
    if duration is not None and duration > 0:
        step = min(step, duration / 100)
    return step


def propagator(H, tau_rydberg, duration, step=None):
    """Superoperator (256x256, row-major) evolving for ``duration`` seconds."""
    spec = H if isinstance(H, HamiltonianSpec) else None
    Hm = spec.H if spec is not None else np.asarray(H, dtype=complex)
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if duration == 0:
        return np.eye(DIM * DIM, dtype=complex)
    if step is None:
        step = duration / 100
    width = spec.max_frequency if spec is not None else float(np.ptp(np.linalg.eigvalsh(Hm)))
    if step * width > math.pi:
        raise StepTooCoarseError(
            f"step {step:.3g} s does not resolve the {width:.3g} rad/s spectral width (needs < {math.pi / width:.3g} s)")
    L = liouvillian(Hm, tau_rydberg)
    n = int(duration // step)
    rem = duration - n * step
    if rem < 1e-12 * step and n > 0:
        rem = 0.0
    P = np.linalg.matrix_power(expm(L * step), n) if n else np.eye(DIM * DIM, dtype=complex)
    if rem > 0:
        P = expm(L * rem) @ P
    if spec is not None and np.any(spec.frame):
        v = np.exp(1j * spec.frame * duration)
        P = np.outer(v, v.conj()).reshape(-1)[:, None] * P
    return P


def evolve(rho, H, tau_rydberg, duration, step=None):
    """Evolve a 16x16 density matrix under ``H`` with Rydberg decay for ``duration``."""
    rho = np.asarray(rho, dtype=complex)
    P = propagator(H, tau_rydberg, duration, step)
    return (P @ rho.reshape(-1)).reshape(DIM, DIM)


def _rotation_superop(step):
    U = np.eye(DIM, dtype=complex)
    single = np.eye(4, dtype=complex)
    single[:2, :2] = step.matrix()
    for a in ATOMS[step.atom]:
        U = embed(single, a) @ U
    return np.kron(U, U.conj())


def step_superoperator(params, step, dt=None):
    p = as_params(params)
    if isinstance(step, Pulse):
        T = step.duration(p)
        spec = build_hamiltonian(p, step)
        return propagator(spec, p.tau, T, dt or default_step(p, step, T))
    if isinstance(step, Gap):
        spec = build_hamiltonian(p, None)
        return propagator(spec, p.tau, step.duration, dt or min(default_step(p), step.duration / 100))
    if isinstance(step, QubitRotation):
        return _rotation_superop(step)
    raise TypeError(f"unknown sequence step {step!r}")


def sequence_superoperator(params, sequence: PulseSequence, step_scale: float = 1.0):
    """Superoperator of the whole sequence; ``step_scale`` scales every default step."""
    p = as_params(params)
    S = np.eye(DIM * DIM, dtype=complex)
    for s in sequence.steps:
        dt = None
        if step_scale != 1.0 and isinstance(s, Pulse):
            dt = step_scale * default_step(p, s, s.duration(p))
        elif step_scale != 1.0 and isinstance(s, Gap):
            dt = step_scale * min(default_step(p), s.duration / 100)
        S = step_superoperator(p, s, dt) @ S
    return S


def apply_superoperator(S, rho):
    return (S @ np.asarray(rho, dtype=complex).reshape(-1)).reshape(DIM, DIM)


def run_sequence(params, sequence, rho0, step_scale=1.0):
    return apply_superoperator(sequence_superoperator(params, sequence, step_scale), rho0)


# ---------------------------------------------------------- independent route

def no_jump_propagator(params, sequence: PulseSequence):
    """16x16 amplitude propagator of the no-jump (non-Hermitian) evolution.

    Since decay only feeds the sink, the computational block of any output
    density matrix equals A rho A^dagger with A this propagator's
    computational block.  Used to cross-check the superoperator route.
    """
    p = as_params(params)
    U = np.eye(DIM, dtype=complex)
    decay = np.zeros(DIM)
    if math.isfinite(p.tau):
        for a in (0, 1):
            decay += np.real(np.diag(embed(_op(R, R), a))) / p.tau
    for s in sequence.steps:
        if isinstance(s, QubitRotation):
            single = np.eye(4, dtype=complex)
            single[:2, :2] = s.matrix()
            for a in ATOMS[s.atom]:
                U = embed(single, a) @ U
            continue
        if isinstance(s, Pulse):
            spec, T = build_hamiltonian(p, s), s.duration(p)
        else:
            spec, T = build_hamiltonian(p, None), s.duration
        Heff = spec.H - 0.5j * np.diag(decay)
        U = np.diag(np.exp(1j * spec.frame * T)) @ expm(-1j * Heff * T) @ U
    return U


# ---------------------------------------------------------------- states

def ket(control, target):
    """Two-atom product ket from single-atom 4-vectors or level indices."""
    def single(x):
        if isinstance(x, (int, np.integer)):
            v = np.zeros(4, dtype=complex)
            v[x] = 1.0
            return v
        v = np.zeros(4, dtype=complex)
        x = np.asarray(x, dtype=complex)
        v[: x.size] = x
        return v
    return np.kron(single(control), single(target))


def dm(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def embed_computational(psi4):
    """4-vector over 00, 01, 10, 11 -> 16-vector."""
    psi = np.zeros(DIM, dtype=complex)
    psi[COMPUTATIONAL] = psi4
    return psi


def state_fidelity(rho, psi) -> float:
    """<psi| rho |psi> for a density matrix and a pure state.

    A 4-dimensional ``psi`` is read in the computational basis and lifted to
    16 dimensions when ``rho`` is 16x16.
    """
    rho = np.asarray(rho, dtype=complex)
    psi = np.asarray(psi, dtype=complex).ravel()
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"rho must be square, got shape {rho.shape}")
    if psi.size == 4 and rho.shape[0] == DIM:
        psi = embed_computational(psi)
    if psi.size != rho.shape[0]:
        raise ValueError(f"dimension mismatch: state {psi.size}, rho {rho.shape[0]}")
    return float(np.real(psi.conj() @ rho @ psi))


PLUS_I = np.array([1, 1j]) / math.sqrt(2)


def bell_target(variant="B1"):
    """Bell state produced by :func:`bell_prep` in the ideal limit, as a 4-vector.

    B1 = (|00> + i|11>)/sqrt(2) and B2 = (|01> + i|10>)/sqrt(2); the factor i
    is the local phase carried over from the (|0> + i|1>)/sqrt(2) control.
    """
    if variant == "B1":
        return np.array([1, 0, 0, 1j]) / math.sqrt(2)
    if variant == "B2":
        return np.array([0, 1, 1j, 0]) / math.sqrt(2)
    raise ValueError(f"variant must be 'B1' or 'B2', got {variant!r}")


def bell_prep(config, variant="B1", cnot="hadamard"):
    """Prepare B1/B2 from control (|0> + i|1>)/sqrt(2) and target |0>/|1> via a CNOT."""
    target = {"B1": G0, "B2": G1}.get(variant)
    if target is None:
        raise ValueError(f"variant must be 'B1' or 'B2', got {variant!r}")
    seq = {"hadamard": cnot_hadamard_variant, "swap": cnot_amplitude_swap}[cnot]()
    rho0 = dm(ket(PLUS_I, target))
    return run_sequence(config, seq, rho0)


# ---------------------------------------------------------------- gate metrics

def gate_inputs():
    """Four computational states and the four (|0>+-|1>)(|0>+-|1>)/2 product states."""
    states = [np.eye(4, dtype=complex)[i] for i in range(4)]
    for sc in (1, -1):
        for st in (1, -1):
            states.append(np.kron([1, sc], [1, st]).astype(complex) / 2)
    return states


def computational_map(S):
    """Recover the 4x4 computational block A of the propagation from a superoperator.

    Uses rho_out = A rho_in A^dagger on the computational block; the global
    phase is fixed by making the largest element of A real and positive.
    """
    S4 = S.reshape(DIM, DIM, DIM, DIM)  # [k, l, i, j] : out[k,l] from in[i,j]
    C = COMPUTATIONAL
    blk = S4[np.ix_(C, C, C, C)]
    pops = np.real(np.einsum("kkii->ki", blk))
    k0, i0 = np.unravel_index(np.argmax(pops), pops.shape)
    return blk[:, k0, :, i0] / math.sqrt(pops[k0, i0])


def align_global_phase(A, ref):
    """Multiply ``A`` by the global phase that best matches ``ref``."""
    ov = np.vdot(ref, A)
    return A if ov == 0 else A * np.conj(ov) / abs(ov)


def phase_frame(S, ideal):
    """Output-side phases theta_k with A ~ diag(e^{i theta}) @ ideal (up to global phase).

    These are the deterministic phases a phase-corrected comparison removes.
    """
    A = align_global_phase(computational_map(S), ideal)
    cols = np.argmax(np.abs(ideal), axis=1)
    return np.angle(A[np.arange(4), cols] / ideal[np.arange(4), cols])


def gate_error(config, sequence: PulseSequence, ideal=None, phase_corrected=False, S=None):
    """1 - mean state fidelity over :func:`gate_inputs`.

    With ``phase_corrected=True`` the output is first rotated by the inverse of
    the measured :func:`phase_frame`, so only population leakage, decay and
    incoherent errors remain.
    """
    ideal = sequence.ideal_map if ideal is None else np.asarray(ideal, dtype=complex)
    if ideal is None or ideal.shape != (4, 4):
        raise ValueError("ideal unitary must be 4x4 on the computational subspace")
    if S is None:
        S = sequence_superoperator(config, sequence)
    corr = np.ones(DIM, dtype=complex)
    if phase_corrected:
        corr[COMPUTATIONAL] = np.exp(-1j * phase_frame(S, ideal))
    fids = []
    for psi in gate_inputs():
        out = apply_superoperator(S, dm(embed_computational(psi)))
        out = corr[:, None] * out * corr.conj()[None, :]
        fids.append(state_fidelity(out, ideal @ psi))
    return 1.0 - float(np.mean(fids))


def leakage(S):
    """Mean population leaving the computational subspace over the basis inputs."""
    out = 0.0
    for i in COMPUTATIONAL:
        rho = np.zeros((DIM, DIM), dtype=complex)
        rho[i, i] = 1.0
        o = apply_superoperator(S, rho)
        out += 1.0 - float(np.real(np.trace(o[np.ix_(COMPUTATIONAL, COMPUTATIONAL)])))
    return out / 4


def blockade_offsets(params, n=8):
    """``n`` blockade shifts near ``params.B`` spanning one period of the
    doubly-excited leakage oscillation sin^2(pi sqrt(1 + B^2/Omega^2))."""
    p = as_params(params)
    s0 = math.sqrt(1 + (p.B / p.omega) ** 2)
    return [p.omega * math.sqrt((s0 + (k - (n - 1) / 2) / n) ** 2 - 1) for k in range(n)]


def blockade_averaged_gate_error(config, sequence, n=8, phase_corrected=True):
    """Gate error averaged over :func:`blockade_offsets`, i.e. over an
    unresolved spread of the blockade shift."""
    p = as_params(config)
    return float(np.mean([gate_error(replace(p, B=b), sequence, phase_corrected=phase_corrected)
                          for b in blockade_offsets(p, n)]))


# ---------------------------------------------------------------- checks & io

def check_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-9, psd_tol=1e-9):
    """Raise AssertionError unless ``rho`` is Hermitian, unit trace and PSD within tolerances."""
    rho = np.asarray(rho)
    herm = np.max(np.abs(rho - rho.conj().T))
    assert herm <= herm_tol * max(1.0, np.max(np.abs(rho))), f"not Hermitian ({herm:.2e})"
    tr = np.trace(rho)
    assert abs(tr - 1) <= trace_tol, f"trace {tr}"
    ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    assert ev[0] >= -psd_tol, f"negative eigenvalue {ev[0]:.2e}"


def write_matrix(fh, M, comment=None):
    """Write a complex matrix as text: ``# rows cols`` then one row per line of
    alternating real/imag values (row-major)."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if comment:
        for line in str(comment).splitlines():
            fh.write(f"# {line}\n")
    fh.write(f"# {M.shape[0]} {M.shape[1]}\n")
    for row in M:
        fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) + "\n")


def read_matrix(fh):
    rows, shape = [], None
    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and all(p.isdigit() for p in parts):
                shape = tuple(int(p) for p in parts)
            continue
        vals = np.array(line.split(), dtype=float)
        rows.append(vals[0::2] + 1j * vals[1::2])
    M = np.array(rows)
    if shape is not None and M.shape != shape:
        raise ValueError(f"matrix shape {M.shape} does not match header {shape}")
    return M


def populations(rho):
    """Per-atom level populations, shape (2, 4) over (0, 1, r, d)."""
    r4 = np.asarray(rho).reshape(4, 4, 4, 4)
    pc = np.real(np.einsum("ajaj->a", r4))
    pt = np.real(np.einsum("jaja->a", r4))
    return np.vstack([pc, pt])


def computational_block(rho):
    return np.asarray(rho)[np.ix_(COMPUTATIONAL, COMPUTATIONAL)]
