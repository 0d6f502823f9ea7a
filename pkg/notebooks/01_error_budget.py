"""
Analytic error budget of the blockade C_Z gate
==============================================

The intrinsic error balances Rydberg decay during the gate against
imperfect blockade.  The two-term model has a closed-form optimum; the
full expression adds the finite hyperfine splitting.
"""

import math

import numpy as np

from rydgate import budget as bd
from rydgate.params import load_config, to_mhz

tau = 860e-6  # 150s_1/2 lifetime

# Invert the closed-form minimum at E_min = 5.5e-5 to get the blockade shift
B = bd.blockade_from_emin(5.5e-5, tau)
print(f"B/2pi = {to_mhz(B) / 1e3:.3f} GHz, Omega_opt/2pi = {to_mhz(bd.omega_opt(B, tau)):.2f} MHz")

# The full expression at the operating point, term by term
w_hf = 2 * math.pi * 6.834682610904e9
W = 2 * math.pi * 30e6
names = ("radiative", "radiative x Omega^2/w_hf^2", "radiative x Omega^2/7B^2", "blockade", "hyperfine")
for name, term in zip(names, bd.gate_error_terms(W, B, w_hf, tau)):
    print(f"  {name:28s} {term:.3e}")
print(f"full expression: {bd.gate_error_full(W, B, w_hf, tau):.3e}")

# Minimising the full expression moves the optimum down, since the
# hyperfine term also grows as Omega^2
W_star, E_star = bd.optimize_rabi(B, w_hf, tau)
print(f"numerical optimum: Omega/2pi = {to_mhz(W_star):.2f} MHz, E = {E_star:.3e}")

# %%
# Separation scan with the anchored van der Waals model
cfg = load_config("rb150s_gate")
for R_um in (4, 5, 6, 8):
    c = cfg.with_overrides({"geometry.r_um": str(R_um)})
    print(f"R = {R_um} um: B/2pi = {to_mhz(c.B):9.1f} MHz, E_min = {bd.e_min(c.B, tau):.2e}")

# %%
# Technical errors and dephasing at the operating point
report = bd.assemble_budget(cfg)
print(report.to_text())

# Lifetime dependence: the closed-form minimum falls as (B tau)^(-2/3)
for n, t in ((75, 180e-6), (100, 340e-6), (125, 570e-6), (150, 860e-6)):
    print(n, f"{bd.e_min(B, t):.2e}")
print(np.round([bd.fidelity_limit(t, report.t2_s) for t in (0, report.t_gap_s, 1e-6)], 6))
