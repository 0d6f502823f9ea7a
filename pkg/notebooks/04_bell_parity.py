"""
Bell-state fidelity from parity oscillations
============================================

The fidelity to (|00> + |11>)/sqrt(2) is estimated from the populations and
the amplitude of the parity oscillation, and corrected for atom loss.
"""

import math

import numpy as np

from rydgate import montecarlo as mc
from rydgate.params import load_config

cfg = load_config("ramsey_97d").with_overrides({"environment.loss_prob": "0.2"})

res = mc.bell_experiment(3.35e-6, 10000, cfg, seed=3)
print("parity amplitude:", round(res.parity_fit.amplitude, 3))
print("surviving fraction:", round(res.surviving_fraction, 3))
print("raw F:", round(res.fidelity_raw, 3), " corrected F:", round(res.fidelity_corrected, 3),
      " exact F:", round(res.fidelity_exact, 3))

# %%
# A state with partial coherence: the parity amplitude is 2 |rho_00,11|
rho = np.diag([0.5, 0, 0, 0.5]).astype(complex)
rho[0, 3] = rho[3, 0] = 0.21
scan = mc.parity_scan(rho, np.linspace(0, math.pi, 16, endpoint=False), 10000, seed=4)
print("amplitude:", round(scan.fit.amplitude, 3), " F estimate:", mc.extract_fidelity(0.5, 0.5, scan.fit.amplitude))

# The oscillation frequency is 2 in the analysis phase, i.e. period pi
free = mc.fit_parity(scan.record.phases, scan.parity, frequency=None)
print("fitted frequency:", free.frequency)
