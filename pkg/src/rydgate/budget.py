"""Analytic error and coherence formulas for the blockade C_Z gate.

Every function takes SI inputs with angular frequencies in rad/s.  Infinite
coherence times are represented by :data:`INFINITE` (``math.inf``) rather than
by a large finite number; all functions here accept it as an input.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import ConvergenceError
from .params import CONSTANTS, ExperimentConfig

INFINITE = math.inf
SEVEN_PI = 7.0 * math.pi


def _positive(**kw):
    for name, x in kw.items():
        if not x > 0:
            raise ValueError(f"{name} must be > 0, got {x}")


# ----------------------------------------------------------- intrinsic error

def omega_opt(B: float, tau: float) -> float:
    """Rabi frequency minimising 7 pi/(4 Omega tau) + Omega^2/(8 B^2)."""
    _positive(B=B, tau=tau)
    return SEVEN_PI ** (1 / 3) * B ** (2 / 3) * tau ** (-1 / 3)


def e_min(B: float, tau: float) -> float:
    """Minimum of the two-term error model, reached at :func:`omega_opt`."""
    _positive(B=B, tau=tau)
    if B * tau < 100:
        warnings.warn(f"B*tau = {B * tau:.3g} is not >> 1; closed form is unreliable", stacklevel=2)
    return 3 * SEVEN_PI ** (2 / 3) / 8 / (B * tau) ** (2 / 3)


def blockade_from_emin(E: float, tau: float) -> float:
    """Invert :func:`e_min` for B at fixed ``tau``."""
    _positive(E=E, tau=tau)
    return (3 * SEVEN_PI ** (2 / 3) / (8 * E)) ** 1.5 / tau


def gate_error_terms(Omega, B, omega_hf, tau):
    """The five additive terms of the full intrinsic-error expression.

    Returns ``(radiative, radiative*Omega^2/omega_hf^2, radiative*Omega^2/(7B^2),
    Omega^2/(8B^2), 6 Omega^2/(8 omega_hf^2))``.  Infinite B, omega_hf or tau
    switch the corresponding terms off.
    """
    _positive(Omega=Omega, B=B, omega_hf=omega_hf, tau=tau)
    rad = SEVEN_PI / (4 * Omega * tau)
    hf = (Omega / omega_hf) ** 2
    bl = (Omega / B) ** 2
    return (rad, rad * hf, rad * bl / 7, bl / 8, 6 * hf / 8)


def gate_error_full(Omega: float, B: float, omega_hf: float, tau: float) -> float:
    """Intrinsic C_Z error including finite hyperfine splitting.

    E = 7 pi/(4 Omega tau) (1 + Omega^2/omega_hf^2 + Omega^2/(7 B^2))
        + Omega^2/(8 B^2) (1 + 6 B^2/omega_hf^2)
    """
    if Omega >= omega_hf:
        raise ValueError("Omega must be below omega_hf")
    return float(sum(gate_error_terms(Omega, B, omega_hf, tau)))


def hyperfine_regime_violated(B, omega_hf):
    """True where 6 B^2/omega_hf^2 > 1, outside the stated validity of the expansion."""
    return 6 * (B / omega_hf) ** 2 > 1


def optimize_rabi(B: float, omega_hf: float, tau: float, model: str = "full"):
    """Numerically minimise the gate error over Omega in (0, omega_hf).

    ``model="full"`` uses :func:`gate_error_full`; ``"two_term"`` uses
    7 pi/(4 Omega tau) + Omega^2/(8 B^2), whose minimiser is :func:`omega_opt`.
    The error is convex in Omega, so the minimum is the unique root of dE/dOmega.

    Returns ``(Omega_star, E_star)``.
    """
    _positive(B=B, omega_hf=omega_hf, tau=tau)
    a = SEVEN_PI / (4 * tau)
    if model == "full":
        lin = a * (1 / omega_hf**2 + 1 / (7 * B**2))
        quad = (1 / B**2 + 6 / omega_hf**2) / 8
        err = lambda w: gate_error_full(w, B, omega_hf, tau)  # noqa: E731
    elif model == "two_term":
        lin, quad = 0.0, 1 / (8 * B**2)
        err = lambda w: a / w + quad * w**2  # noqa: E731
    else:
        raise ValueError(f"unknown model {model!r}")

    def slope(log_w):
        w = math.exp(log_w)
        return (-a / w**2 + lin + 2 * quad * w) * w**2 / a

    hi = omega_hf if math.isfinite(omega_hf) else 1e3 * omega_opt(B, tau)
    lo = 1e-6 * min(omega_opt(B, tau), hi)
    hi = math.nextafter(hi, 0)
    if not (slope(math.log(lo)) < 0 < slope(math.log(hi))):
        raise ConvergenceError("could not bracket the minimum of the gate error in (0, omega_hf)")
    log_w = optimize.brentq(slope, math.log(lo), math.log(hi), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    w = math.exp(log_w)
    return w, err(w)


# ---------------------------------------------------------- technical errors

def spont_emission_prob(Omega: float, Omega_1: float, gamma_p: float) -> float:
    """Intermediate-state emission probability in a pi pulse, from
    Omega = (P_se/pi) |Omega_1|^2 / gamma_p with equal one-photon Rabi frequencies."""
    _positive(Omega=Omega, Omega_1=Omega_1, gamma_p=gamma_p)
    return math.pi * Omega * gamma_p / Omega_1**2


def spont_emission_prob_detuned(gamma_p: float, Delta: float) -> float:
    """Same probability with Omega = Omega_1^2/(2 Delta) substituted: pi gamma_p / (2 |Delta|)."""
    _positive(gamma_p=gamma_p, Delta=abs(Delta))
    return math.pi * gamma_p / (2 * abs(Delta))


def pi_pulse_infidelity(x):
    """1 - P_pi for a pi pulse detuned by ``x = Delta/Omega``; exact, cancellation free.

    P_pi = sin^2(pi/2 sqrt(1+x^2)) / (1+x^2), so
    1 - P_pi = (x^2 + cos^2(pi/2 sqrt(1+x^2))) / (1+x^2).
    """
    x2 = np.square(x)
    s = np.sqrt(1 + x2)
    c = np.sin(0.5 * np.pi * x2 / (s + 1))  # = -cos(pi/2 * s)
    return (x2 + c * c) / (1 + x2)


def doppler_excitation_error(Omega: float, T: float, m: float, k_2nu: float) -> float:
    """Thermal average of the pi-pulse transfer error for 1-D Doppler shifts k v.

    The velocity is Gaussian with <v^2> = k_B T / m.  Evaluated by adaptive
    quadrature over the standardised velocity.
    """
    _positive(Omega=Omega, m=m)
    if T < 0 or k_2nu < 0:
        raise ValueError("temperature and wavenumber must be >= 0")
    if T == 0 or k_2nu == 0:
        return 0.0
    scale = k_2nu * math.sqrt(CONSTANTS.k_B * T / m) / Omega  # rms Delta/Omega
    f = lambda u: pi_pulse_infidelity(scale * u) * math.exp(-0.5 * u * u)  # noqa: E731
    val, abserr = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    if not abserr <= 1e-6 * max(val, 1e-300):
        raise ConvergenceError(f"Doppler quadrature did not converge (error estimate {abserr:g})")
    return 2 * val / math.sqrt(2 * math.pi)


def doppler_excitation_error_leading(Omega, T, m, k_2nu):
    """Leading-order small-shift limit k^2 k_B T / (m Omega^2)."""
    return k_2nu**2 * CONSTANTS.k_B * T / (m * Omega**2)


# --------------------------------------------------------------- dephasing

def t2_magnetic(delta_gm: float, sigma: float, hbar: float = CONSTANTS.hbar, mu_B: float = CONSTANTS.mu_B) -> float:
    """1/e time of the Gaussian Ramsey envelope from quasi-static field noise.

    T2_B = 2^(3/2) pi hbar / (|g_R m_jR - g_g m_fg| mu_B sigma).  Returns
    :data:`INFINITE` for a field-insensitive pair or zero noise.
    """
    if delta_gm < 0 or sigma < 0:
        raise ValueError("delta_gm and sigma must be >= 0")
    if delta_gm == 0 or sigma == 0:
        return INFINITE
    return 2**1.5 * math.pi * hbar / (delta_gm * mu_B * sigma)


def t2_doppler(T: float, m: float, k_2nu: float) -> float:
    """1/e time of the Doppler dephasing envelope, (2 m / k_B T)^(1/2) / k_2nu."""
    if T < 0 or k_2nu < 0:
        raise ValueError("temperature and wavenumber must be >= 0")
    _positive(m=m)
    if T == 0 or k_2nu == 0:
        return INFINITE
    return math.sqrt(2 * m / (CONSTANTS.k_B * T)) / k_2nu


def t2_combined(T2_B: float, T2_D: float) -> float:
    """Envelope time when both Gaussian channels act: T_B T_D / sqrt(T_B^2 + T_D^2)."""
    _positive(T2_B=T2_B, T2_D=T2_D)
    if math.isinf(T2_B) or math.isinf(T2_D):
        return min(T2_B, T2_D)
    # clamp so rounding never lifts the result above the faster channel
    return min(1 / math.sqrt(1 / T2_B**2 + 1 / T2_D**2), T2_B, T2_D)


def fidelity_limit(t, T2):
    """Bell fidelity limit (1 + exp(-t^2/T2^2)) / 2; vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    _positive(T2=T2)
    F = 0.5 * (1 + np.exp(-np.square(t / T2)))
    return float(F) if F.ndim == 0 else F


# ------------------------------------------------------------------ report

@dataclass(frozen=True)
class ErrorBudgetReport:
    blockade_shift_rad_s: float
    rabi_rad_s: float
    tau_s: float
    intrinsic_error: float
    intrinsic_terms: tuple
    omega_opt_rad_s: float
    e_min: float
    omega_star_rad_s: float
    e_star: float
    p_se: float
    p_se_detuned: float
    doppler_excitation_error: float
    t2_b_s: float
    t2_d_s: float
    t2_s: float
    gap_time_s: float
    fidelity_limit: float
    dephasing_error: float
    t_gap_s: float
    timing_tolerance_s: float
    flags: tuple = ()
    defaulted: tuple = field(default=())

    @property
    def total_gate_error(self):
        """Sum of the separately estimated gate errors (small-error additivity)."""
        return self.intrinsic_error + self.p_se + self.doppler_excitation_error + self.dephasing_error

    def to_dict(self):
        d = asdict(self)
        d["intrinsic_terms"] = list(self.intrinsic_terms)
        d["flags"] = list(self.flags)
        d["defaulted"] = list(self.defaulted)
        d["total_gate_error"] = self.total_gate_error
        return d

    def to_text(self):
        """Flat ``key = value`` lines; units are part of every key name."""
        lines = []
        for k, v in self.to_dict().items():
            if isinstance(v, list):
                v = ",".join(f"{x!r}" if isinstance(x, float) else str(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    def to_json(self, **kw):
        def enc(v):
            if isinstance(v, float) and not math.isfinite(v):
                return "inf" if v > 0 else "nan"
            if isinstance(v, list):
                return [enc(x) for x in v]
            return v
        return json.dumps({k: enc(v) for k, v in self.to_dict().items()}, **kw)


def timing_tolerance(Omega, population_error=1e-3):
    """Pulse-length error that leaves ``population_error`` untransferred in a pi pulse."""
    return 2 * math.asin(math.sqrt(population_error)) / Omega


def assemble_budget(config: ExperimentConfig) -> ErrorBudgetReport:
    """Evaluate every error term at the configured operating point."""
    sp, lv, ls, env = config.species, config.level, config.laser, config.environment
    B, W, tau = config.B, ls.omega, lv.tau
    flags = []
    if hyperfine_regime_violated(B, sp.omega_hf):
        flags.append("blockade_exceeds_hyperfine")
    if B * tau < 100:
        flags.append("small_B_tau")
    if W >= B / 10:
        flags.append("weak_blockade")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        e_star = optimize_rabi(B, sp.omega_hf, tau)
        emin = e_min(B, tau)

    T2B = t2_magnetic(config.delta_gm, env.sigma, config.constants.hbar, config.constants.mu_B)
    T2D = t2_doppler(env.temperature, sp.mass, config.k_2nu)
    T2 = t2_combined(T2B, T2D)
    t_gap = 2 * math.pi / W
    gap = t_gap if env.gap_time is None else env.gap_time
    F = fidelity_limit(gap, T2)
    return ErrorBudgetReport(
        blockade_shift_rad_s=B,
        rabi_rad_s=W,
        tau_s=tau,
        intrinsic_error=gate_error_full(W, B, sp.omega_hf, tau),
        intrinsic_terms=gate_error_terms(W, B, sp.omega_hf, tau),
        omega_opt_rad_s=omega_opt(B, tau),
        e_min=emin,
        omega_star_rad_s=e_star[0],
        e_star=e_star[1],
        p_se=spont_emission_prob(W, ls.omega_1, ls.gamma_p),
        p_se_detuned=spont_emission_prob_detuned(ls.gamma_p, ls.delta),
        doppler_excitation_error=doppler_excitation_error(W, env.temperature, sp.mass, config.k_2nu),
        t2_b_s=T2B,
        t2_d_s=T2D,
        t2_s=T2,
        gap_time_s=gap,
        fidelity_limit=F,
        dephasing_error=1 - F,
        t_gap_s=t_gap,
        timing_tolerance_s=timing_tolerance(W),
        flags=tuple(flags),
        defaulted=tuple(config.defaulted),
    )
