"""Shot-level simulation of Ramsey decay, Bell-state measurements and parity scans.

Noise is quasi-static: each shot draws one atomic velocity (1-D thermal,
<v^2> = k_B T/m) and one magnetic field offset (Gaussian, rms sigma), held
fixed for the whole shot.  Each scan point gets its own child seed from
``numpy.random.SeedSequence(seed).spawn``, so records are reproducible and
points can be simulated in any order and merged by adding counts.

Magnetic phase calibration: the field phase rate is c_B = sqrt(2)/(sigma T2_B)
with T2_B from :func:`rydgate.budget.t2_magnetic`, which makes the shot
average <exp(i c_B b t)> equal exp(-t^2/T2_B^2) exactly.  The Doppler phase
k v t needs no calibration.

Lost atoms read out as ``0``.  Shots in which either atom is lost are also
tallied in ``lost_counts`` so loss correction can post-select survivors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .budget import INFINITE, t2_magnetic
from .dynamics import bell_prep, bell_target, computational_block, dm
from .errors import RydgateError

OUTCOMES = ("00", "01", "10", "11")
PARITY_SIGN = np.array([1, -1, -1, 1])


def _children(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


# ------------------------------------------------------------------ shots

@dataclass(frozen=True)
class ShotSample:
    """Per-shot noise realisations for ``n`` shots.

    velocity : (n, 2) velocity of (control, target) along k_2nu, m/s
    field    : (n,) quasi-static field offset, T
    lost     : (n, 2) loss flags of (control, target)
    """

    velocity: np.ndarray
    field: np.ndarray
    lost: np.ndarray

    def __len__(self):
        return self.field.size


def draw_shots(config, n, rng) -> ShotSample:
    """Draw ``n`` shots; always consumes the stream in the same order."""
    env, sp = config.environment, config.species
    v_rms = math.sqrt(config.constants.k_B * env.temperature / sp.mass)
    velocity = v_rms * rng.standard_normal((n, 2))
    b = env.sigma * rng.standard_normal(n)
    survive = (1.0 - env.loss_prob) ** env.loss_stages
    lost = rng.random((n, 2)) >= survive
    return ShotSample(velocity, b, lost)


def magnetic_phase_rate(config):
    """c_B in rad/(s T), or 0 when the field channel is off."""
    sigma = config.environment.sigma
    T2B = t2_magnetic(config.delta_gm, sigma, config.constants.hbar, config.constants.mu_B)
    if sigma == 0 or math.isinf(T2B):
        return 0.0
    return math.sqrt(2) / (sigma * T2B)


def stochastic_phase(sample: ShotSample, t, config, atom=0):
    """Phase k_2nu v t + c_B b t accumulated by the Rydberg-excited ``atom`` over ``t``."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    return (config.k_2nu * sample.velocity[:, atom] + magnetic_phase_rate(config) * sample.field) * t


def envelope(phases):
    """Shot estimate of <exp(i phi)> (real part) and its standard error."""
    c = np.cos(phases)
    return float(c.mean()), float(c.std(ddof=1) / math.sqrt(c.size)) if c.size > 1 else math.inf


# ----------------------------------------------------------------- Ramsey

@dataclass(frozen=True)
class EnvelopeFit:
    T2: float
    amplitude: float
    residual_norm: float
    uncertainty: float
    ok: bool = True
    message: str = ""


def gaussian_envelope(t, A, g):
    return A * np.exp(-g * np.square(t))


def fit_envelope(t, contrast, sigma=None) -> EnvelopeFit:
    """Fit ``A exp(-t^2/T2^2)``; no measurable decay returns T2 = :data:`INFINITE`."""
    t = np.asarray(t, float)
    y = np.asarray(contrast, float)
    if sigma is None:
        sigma = np.full_like(y, 1e-3)
    if np.all(np.abs(y - y[0]) <= 1e-12) and y[0] > 0:
        return EnvelopeFit(INFINITE, float(y[0]), 0.0, INFINITE, True, "no decay")
    good = y > 0.05 * np.max(y)
    g0 = 1.0 / np.max(t) ** 2
    if good.sum() >= 2 and np.ptp(t[good]) > 0:
        slope = np.polyfit(np.square(t[good]), np.log(y[good]), 1)[0]
        g0 = max(-slope, 1e-6 / np.max(t) ** 2)
    try:
        (A, g), pcov = curve_fit(gaussian_envelope, t, y, p0=(max(y[0], 1e-3), g0), sigma=sigma,
                                 absolute_sigma=True, bounds=([0, 0], [2, np.inf]), max_nfev=10000)
    except (RuntimeError, ValueError) as exc:
        return EnvelopeFit(math.nan, math.nan, math.nan, math.nan, False, str(exc))
    res = float(np.linalg.norm(y - gaussian_envelope(t, A, g)))
    sg = math.sqrt(max(pcov[1, 1], 0.0))
    if g * np.max(t) ** 2 < 1e-9:
        return EnvelopeFit(INFINITE, float(A), res, INFINITE, True, "no decay")
    T2 = 1 / math.sqrt(g)
    return EnvelopeFit(T2, float(A), res, float(max(0.5 * sg * g**-1.5, np.finfo(float).tiny)))


@dataclass(frozen=True)
class RamseyResult:
    t: np.ndarray
    signal: np.ndarray  # population at fringe phase detuning * t
    p_bright: np.ndarray  # population at fringe phase 0
    p_dark: np.ndarray  # population at fringe phase pi
    contrast: np.ndarray
    contrast_err: np.ndarray
    fit: EnvelopeFit
    shots: int
    seed: int
    detuning: float

    def to_rows(self):
        return [dict(t_us=t * 1e6, signal=s, p_bright=b, p_dark=d, contrast=c, contrast_err=e)
                for t, s, b, d, c, e in zip(self.t, self.signal, self.p_bright, self.p_dark,
                                            self.contrast, self.contrast_err)]


def _bernoulli_mean(p, rng, noise):
    if not noise:
        return float(np.mean(p))
    return float(np.mean(rng.random(p.size) < p))


def ramsey_simulate(t_grid, shots, config, seed, detuning=2 * math.pi * 1e6, projection_noise=True) -> RamseyResult:
    """Ground-Rydberg Ramsey experiment with quasi-static dephasing.

    For every gap time, three settings of ``shots`` shots each are measured:
    fringe phase ``detuning * t`` (the fringe signal) and fringe phases 0 and
    pi, whose difference is the fringe contrast <cos phi_st>.  The contrast is
    fitted to A exp(-t^2/T2^2).
    """
    t_grid = np.asarray(t_grid, float)
    if t_grid.size == 0:
        raise ValueError("t_grid must not be empty")
    if shots < 100:
        raise ValueError("need at least 100 shots per point")
    sig, pb, pd = (np.empty(t_grid.size) for _ in range(3))
    for i, (t, rng) in enumerate(zip(t_grid, _children(seed, t_grid.size))):
        est = []
        for phi_det in (detuning * t, 0.0, math.pi):
            phi = stochastic_phase(draw_shots(config, shots, rng), t, config)
            est.append(_bernoulli_mean(0.5 * (1 + np.cos(phi_det + phi)), rng, projection_noise))
        sig[i], pb[i], pd[i] = est
    contrast = pb - pd
    err = np.sqrt((pb * (1 - pb) + pd * (1 - pd)) / shots)
    err = np.maximum(err, 1.0 / shots)
    fit = fit_envelope(t_grid, contrast, err)
    return RamseyResult(t_grid, sig, pb, pd, contrast, err, fit, shots, seed, detuning)


# ------------------------------------------------------------ measurement

def analysis_rotation(phi):
    """pi/2 rotation about (cos phi, sin phi, 0) applied to both qubits (4x4)."""
    r = np.array([[1, -1j * np.exp(-1j * phi)], [-1j * np.exp(1j * phi), 1]]) / math.sqrt(2)
    return np.kron(r, r)


@dataclass
class MeasurementRecord:
    """Outcome counts per measurement setting.

    ``phases[i]`` is the analysis phase of setting i, NaN for a plain
    computational-basis readout.  ``counts`` (all shots, lost atoms reading 0)
    sum to ``shots`` per row; ``lost_counts`` is the part of ``counts`` from
    shots in which at least one atom was lost.
    """

    phases: np.ndarray
    counts: np.ndarray
    lost_counts: np.ndarray
    shots: int
    seed: int | None = None
    label: str = ""

    def __post_init__(self):
        self.phases = np.asarray(self.phases, float)
        self.counts = np.asarray(self.counts, np.int64).reshape(-1, 4)
        self.lost_counts = np.asarray(self.lost_counts, np.int64).reshape(-1, 4)
        if not np.all(self.counts.sum(axis=1) == self.shots):
            raise RydgateError("counts must sum to shots in every row")
        if np.any(self.lost_counts > self.counts):
            raise RydgateError("lost counts exceed counts")

    @property
    def lost(self):
        return self.lost_counts.sum(axis=1)

    @property
    def survivor_counts(self):
        return self.counts - self.lost_counts

    def merge(self, other: "MeasurementRecord") -> "MeasurementRecord":
        """Combine two records of the same settings by adding counts."""
        if not np.array_equal(self.phases, other.phases, equal_nan=True):
            raise RydgateError("cannot merge records with different settings")
        return MeasurementRecord(self.phases, self.counts + other.counts, self.lost_counts + other.lost_counts,
                                 self.shots + other.shots, None, self.label)

    def parity(self, survivors=True):
        c = self.survivor_counts if survivors else self.counts
        n = c.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return (c @ PARITY_SIGN) / n

    def to_csv(self, fh, header=()):
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["analysis_phase_rad", "shots", "n00", "n01", "n10", "n11", "lost",
                    "s00", "s01", "s10", "s11", "parity_survivors"])
        par = self.parity()
        for ph, c, lc, lo, pi in zip(self.phases, self.counts, self.lost_counts, self.lost, par):
            s = c - lc
            w.writerow(["none" if np.isnan(ph) else repr(float(ph)), self.shots, *map(int, c), int(lo),
                        *map(int, s), "nan" if np.isnan(pi) else repr(float(pi))])

    def to_dict(self):
        return {"label": self.label, "seed": self.seed, "shots": self.shots,
                "phases": [None if np.isnan(p) else float(p) for p in self.phases],
                "counts": self.counts.tolist(), "lost_counts": self.lost_counts.tolist()}


def _sample_outcomes(probs, lost, rng):
    """Draw outcome indices (0..3) from per-shot probabilities; lost atoms read 0."""
    cdf = np.cumsum(probs, axis=1)
    cdf[:, -1] = np.maximum(cdf[:, -1], 1.0)
    k = (rng.random((probs.shape[0], 1)) > cdf).sum(axis=1)
    k = np.minimum(k, 3)
    c_bit, t_bit = k // 2, k % 2
    c_bit = np.where(lost[:, 0], 0, c_bit)
    t_bit = np.where(lost[:, 1], 0, t_bit)
    return 2 * c_bit + t_bit


def _measure(rho_shots, phi, lost, rng):
    """Counts for one setting given per-shot 4x4 states (n, 4, 4)."""
    if np.isnan(phi):
        probs = np.real(np.einsum("sii->si", rho_shots))
    else:
        R = analysis_rotation(phi)
        probs = np.real(np.einsum("ki,sij,kj->sk", R, rho_shots, R.conj()))
    probs = np.clip(probs, 0.0, None)
    k = _sample_outcomes(probs, lost, rng)
    anyl = lost.any(axis=1)
    return np.bincount(k, minlength=4), np.bincount(k[anyl], minlength=4)


# ---------------------------------------------------------------- parity

@dataclass(frozen=True)
class ParityFit:
    amplitude: float
    phase: float
    offset: float
    frequency: float
    residual_norm: float


def fit_parity(phases, parity, frequency=2.0) -> ParityFit:
    """Least-squares fit of offset + A cos(f phi + phi0).

    With ``frequency=None`` the frequency is also fitted (grid search over
    0.5..4 followed by the linear fit), which is how the oscillation period is
    measured rather than assumed.
    """
    phases = np.asarray(phases, float)
    parity = np.asarray(parity, float)

    def linfit(f):
        X = np.column_stack([np.cos(f * phases), np.sin(f * phases), np.ones_like(phases)])
        coef, *_ = np.linalg.lstsq(X, parity, rcond=None)
        return coef, float(np.linalg.norm(X @ coef - parity))

    if frequency is None:
        grid = np.linspace(0.5, 4.0, 701)
        frequency = float(grid[np.argmin([linfit(f)[1] for f in grid])])
    (a, b, c), res = linfit(frequency)
    return ParityFit(float(math.hypot(a, b)), float(math.atan2(-b, a)), float(c), float(frequency), res)


@dataclass(frozen=True)
class ParityScan:
    record: MeasurementRecord
    parity: np.ndarray
    fit: ParityFit


def parity_scan(rho, phase_grid, shots_per_point, seed) -> ParityScan:
    """Sample the two-qubit parity after pi/2 analysis pulses of phase ``phi``.

    ``rho`` is a 4x4 density matrix on (00, 01, 10, 11), or an ensemble
    (M, 4, 4) whose members are equally likely; i.i.d. shots of such an
    ensemble are distributed like its mean, which is what is sampled.
    """
    rho = np.asarray(rho, complex)
    if rho.ndim == 3:
        rho = rho.mean(axis=0)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 state, got {rho.shape}")
    phases = np.asarray(phase_grid, float)
    if phases.size < 3 or np.ptp(phases) < math.pi * (1 - 1 / phases.size) - 1e-12:
        raise ValueError("phase grid must span at least one parity period (pi)")
    counts = []
    for phi, rng in zip(phases, _children(seed, phases.size)):
        R = analysis_rotation(phi)
        p = np.clip(np.real(np.diag(R @ rho @ R.conj().T)), 0, None)
        counts.append(rng.multinomial(shots_per_point, p / p.sum()))
    rec = MeasurementRecord(phases, counts, np.zeros((phases.size, 4)), shots_per_point, seed, "parity")
    par = rec.parity()
    return ParityScan(rec, par, fit_parity(phases, par))


def extract_fidelity(P00, P11, A):
    """Bell-state fidelity estimate (P00 + P11)/2 + A/2 from populations and parity amplitude."""
    for name, x in (("P00", P00), ("P11", P11), ("A", A)):
        if not -1e-12 <= x <= 1 + 1e-12:
            raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return 0.5 * (P00 + P11) + 0.5 * A


@dataclass(frozen=True)
class LossCorrection:
    raw: float
    corrected: float
    surviving_fraction: float


UNCORRELATED_FIDELITY = 0.25


def _fidelity_from_counts(counts, phases):
    comp = np.isnan(phases)
    pc = counts[comp].sum(axis=0)
    if pc.sum() == 0:
        raise RydgateError("no computational-basis shots to estimate populations")
    P = pc / pc.sum()
    scan = ~comp
    n = counts[scan].sum(axis=1)
    ok = n > 0
    par = (counts[scan][ok] @ PARITY_SIGN) / n[ok]
    A = fit_parity(phases[scan][ok], par).amplitude if ok.sum() >= 3 else 0.0
    return extract_fidelity(P[0], P[3], min(A, 1.0))


def loss_correct(record: MeasurementRecord) -> LossCorrection:
    """Fidelity over all shots (lost shots counted as uncorrelated, F = 1/4) and
    over the surviving pairs only."""
    total = record.counts.sum()
    surv = record.survivor_counts
    if surv.sum() == 0:
        raise RydgateError("no surviving shots")
    frac = float(surv.sum() / total)
    corrected = _fidelity_from_counts(surv, record.phases)
    raw = frac * corrected + (1 - frac) * UNCORRELATED_FIDELITY
    return LossCorrection(float(raw), float(corrected), frac)


# ------------------------------------------------------------------- Bell

@dataclass(frozen=True)
class BellResult:
    record: MeasurementRecord
    fidelity_exact: float  # shot average of <B|rho|B>, before measurement
    fidelity_raw: float
    fidelity_corrected: float
    surviving_fraction: float
    parity_fit: ParityFit
    gap_time: float
    variant: str

    def summary(self):
        f = self.parity_fit
        return {"variant": self.variant, "gap_time_s": float(self.gap_time), "shots": self.record.shots,
                "seed": self.record.seed, "fidelity_exact": float(self.fidelity_exact),
                "fidelity_raw": float(self.fidelity_raw), "fidelity_corrected": float(self.fidelity_corrected),
                "surviving_fraction": float(self.surviving_fraction), "parity_amplitude": f.amplitude,
                "parity_phase_rad": f.phase, "parity_offset": f.offset}


X_TARGET = np.kron(np.eye(2), np.array([[0, 1], [1, 0]]))


def bell_experiment(gap_t, shots, config, seed, variant="B1", ideal_dynamics=True,
                    phase_grid=None, cnot="hadamard") -> BellResult:
    """Simulated Bell-state preparation, Rydberg gap dephasing and readout.

    The prepared state is the ideal Bell state (``ideal_dynamics``) or the
    computational block of :func:`rydgate.dynamics.bell_prep`; any population
    left outside the qubit space counts as atom loss.  During the gap the
    control atom's |1> amplitude, which was carried by the Rydberg state,
    picks up the stochastic phase.  One setting measures populations, the
    others scan the parity analysis phase.  B2 is read out after an ideal
    target flip, which maps it onto the B1 estimator.
    """
    if shots < 100:
        raise ValueError("need at least 100 shots per setting")
    if gap_t < 0:
        raise ValueError("gap time must be >= 0")
    target = bell_target(variant)
    if ideal_dynamics:
        rho0 = dm(target)
    else:
        rho0 = computational_block(bell_prep(config, variant, cnot))
    leak = max(0.0, 1.0 - float(np.real(np.trace(rho0))))
    if variant == "B2":
        rho0 = X_TARGET @ rho0 @ X_TARGET
        target = X_TARGET @ target
    if phase_grid is None:
        phase_grid = np.linspace(0, math.pi, 16, endpoint=False)
    phases = np.concatenate([[np.nan], np.asarray(phase_grid, float)])

    counts, lost_counts, fid = [], [], []
    for phi_a, rng in zip(phases, _children(seed, phases.size)):
        sample = draw_shots(config, shots, rng)
        phi = stochastic_phase(sample, gap_t, config, atom=0)
        lost = sample.lost.copy()
        if leak > 0:
            lost |= (rng.random(shots) < leak)[:, None]
        ph = np.exp(-1j * phi)
        theta = np.stack([np.ones_like(ph), np.ones_like(ph), ph, ph], axis=1)
        rho_s = theta[:, :, None] * rho0[None] * theta.conj()[:, None, :]
        if np.isnan(phi_a):
            fid.append(np.real(np.einsum("i,sij,j->s", target.conj(), rho_s, target)).mean())
        c, lc = _measure(rho_s, phi_a, lost, rng)
        counts.append(c)
        lost_counts.append(lc)
    rec = MeasurementRecord(phases, counts, lost_counts, shots, seed, f"bell-{variant}")
    lc_ = loss_correct(rec)
    scan = ~np.isnan(phases)
    fitp = fit_parity(phases[scan], rec.parity()[scan])
    norm = float(np.real(np.trace(rho0)))
    return BellResult(rec, float(fid[0]) / norm if norm > 0 else 0.0, lc_.raw, lc_.corrected,
                      lc_.surviving_fraction, fitp, gap_t, variant)


def summary_json(obj, meta=None):
    d = dict(meta or {})
    d.update(obj)
    buf = io.StringIO()
    json.dump(d, buf, indent=2, sort_keys=True, default=lambda x: None if isinstance(x, float) and math.isnan(x) else str(x))
    return buf.getvalue() + "\n"


__all__ = [
    "ShotSample", "draw_shots", "stochastic_phase", "magnetic_phase_rate", "envelope", "EnvelopeFit",
    "fit_envelope", "RamseyResult", "ramsey_simulate", "MeasurementRecord", "ParityFit", "fit_parity",
    "ParityScan", "parity_scan", "extract_fidelity", "LossCorrection", "loss_correct", "BellResult",
    "bell_experiment", "analysis_rotation",
]
