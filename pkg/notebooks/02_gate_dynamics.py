"""
Density-matrix simulation of the blockade protocols
===================================================

The pulse sequences are propagated with the exact Lindblad superoperator on
the two-atom space {0, 1, r, d} x {0, 1, r, d}.
"""

import math
from dataclasses import replace

import numpy as np

from rydgate import budget as bd
from rydgate import dynamics as dy

W = 2 * math.pi * 30e6
ideal = dy.GateParams(W, math.inf, math.inf, math.inf)

# Ideal limit: perfect blockade, no decay, no spectator coupling
for seq in (dy.cz_sequence(), dy.cnot_hadamard_variant(), dy.cnot_amplitude_swap()):
    A = dy.align_global_phase(dy.computational_map(dy.sequence_superoperator(ideal, seq)), seq.ideal_map)
    print(seq.name, "max deviation from ideal map:", f"{np.max(np.abs(A - seq.ideal_map)):.1e}")

# %%
# Decay only: the error is the integrated Rydberg occupation 7 pi / (4 Omega tau)
p = replace(ideal, tau=860e-6)
print("decay only:", dy.gate_error(p, dy.cz_sequence()), 7 * math.pi / (4 * W * 860e-6))

# %%
# Finite blockade: the doubly excited leakage oscillates with B, so we
# average over a period of the oscillation and compare with Omega^2 / 8 B^2
for ratio in (0.1, 0.05, 0.02):
    q = replace(ideal, B=W / ratio)
    print(f"Omega/B = {ratio}: {dy.blockade_averaged_gate_error(q, dy.cz_sequence()):.3e} vs {ratio**2 / 8:.3e}")

# %%
# Scan Omega at fixed B and tau: the simulated minimum sits near Omega_opt
B, tau = 2 * math.pi * 10e6, 340e-6
W0 = bd.omega_opt(B, tau)
for f in np.geomspace(0.4, 2.5, 7):
    E = dy.blockade_averaged_gate_error(dy.GateParams(f * W0, B, tau, math.inf), dy.cz_sequence())
    print(f"Omega/Omega_opt = {f:.2f}: E = {E:.3e}")

# %%
# Bell-state preparation at the 150s operating point
p150 = dy.GateParams(W, 2 * math.pi * 2.3e9, 860e-6, 2 * math.pi * 6.834682610904e9)
for variant in ("B1", "B2"):
    rho = dy.bell_prep(p150, variant)
    print(variant, "infidelity:", 1 - dy.state_fidelity(rho, dy.bell_target(variant)))
