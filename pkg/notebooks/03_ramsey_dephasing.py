"""
Ramsey decay from magnetic and Doppler dephasing
================================================

Each shot draws a velocity and a field offset that stay fixed during the gap.
The fringe contrast decays as a Gaussian whose 1/e time combines both channels.
"""

import numpy as np

from rydgate import budget as bd
from rydgate import montecarlo as mc
from rydgate.params import load_config

cfg = load_config("ramsey_97d")
report = bd.assemble_budget(cfg)
print(f"T2_B = {report.t2_b_s * 1e6:.2f} us, T2_D = {report.t2_d_s * 1e6:.2f} us, T2 = {report.t2_s * 1e6:.2f} us")

t = np.linspace(0, 8e-6, 17)
res = mc.ramsey_simulate(t, 10000, cfg, seed=1)
for row in res.to_rows()[::4]:
    print(f"t = {row['t_us']:4.1f} us  contrast = {row['contrast']:.3f} +- {row['contrast_err']:.3f}")
print(f"fitted T2 = {res.fit.T2 * 1e6:.3f} +- {res.fit.uncertainty * 1e6:.3f} us")

# %%
# Single channels
for key in ("environment.temperature_uk", "environment.sigma_tesla"):
    c = cfg.with_overrides({key: "0"})
    grid = np.linspace(0, 30e-6, 16) if key.endswith("uk") else t
    print(key, "= 0 ->", f"{mc.ramsey_simulate(grid, 10000, c, seed=2).fit.T2 * 1e6:.2f} us")

# %%
# Bell fidelity limit versus gap time
for gap in (0.0, 1e-6, 3.35e-6, 10e-6):
    print(f"gap = {gap * 1e6:5.2f} us: F = {bd.fidelity_limit(gap, report.t2_s):.3f}")
