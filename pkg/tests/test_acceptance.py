"""Acceptance gate: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import ghz, mhz, record_acceptance
from rydgate import budget as bd
from rydgate import dynamics as dy
from rydgate import montecarlo as mc
from rydgate.cli import run

M = oracles.RB87_MASS
K_CO = oracles.k_two_photon(480e-9, 780e-9)


def check(n, ok, detail):
    record_acceptance(n, ok, detail)
    assert ok, detail


def test_01_t2_magnetic():
    T = bd.t2_magnetic(3, 2.5e-6)
    check(1, abs(T - 13.5e-6) <= 0.2e-6, f"T2_B = {T * 1e6:.3f} us (13.5 +- 0.2)")


def test_02_t2_doppler():
    T = bd.t2_doppler(60e-6, M, K_CO)
    check(2, abs(T - 3.7e-6) <= 0.1e-6, f"T2_D = {T * 1e6:.3f} us (3.7 +- 0.1)")


def test_03_t2_combined():
    T = bd.t2_combined(13.5e-6, 3.7e-6)
    check(3, abs(T - 3.57e-6) <= 0.05e-6, f"T2 = {T * 1e6:.3f} us (3.57 +- 0.05)")


def test_04_monte_carlo_ramsey(cfg_97d):
    t0 = time.perf_counter()
    both = mc.ramsey_simulate(np.linspace(0, 8e-6, 17), 10000, cfg_97d, seed=2024)
    mag_cfg = cfg_97d.with_overrides({"environment.temperature_uk": "0"})
    dop_cfg = cfg_97d.with_overrides({"environment.sigma_tesla": "0"})
    mag = mc.ramsey_simulate(np.linspace(0, 30e-6, 16), 10000, mag_cfg, seed=2025)
    dop = mc.ramsey_simulate(np.linspace(0, 8e-6, 17), 10000, dop_cfg, seed=2026)
    elapsed = time.perf_counter() - t0
    T2B = bd.t2_magnetic(cfg_97d.delta_gm, 2.5e-6)
    T2D = bd.t2_doppler(60e-6, cfg_97d.species.mass, cfg_97d.k_2nu)
    ok = (3.4e-6 <= both.fit.T2 <= 3.8e-6 and abs(mag.fit.T2 / T2B - 1) < 0.05
          and abs(dop.fit.T2 / T2D - 1) < 0.05 and elapsed < 60)
    check(4, ok, f"T2 fit = {both.fit.T2 * 1e6:.3f} us in [3.4, 3.8]; magnetic {mag.fit.T2 / T2B - 1:+.3%}, "
                 f"Doppler {dop.fit.T2 / T2D - 1:+.3%} (5%); {elapsed:.1f} s")


def test_05_fidelity_limit(cfg_97d):
    T2 = bd.assemble_budget(cfg_97d).t2_s
    F0 = bd.fidelity_limit(0.0, T2)
    Finf = bd.fidelity_limit(1e3 * T2, T2)
    F = bd.fidelity_limit(3.35e-6, T2)
    check(5, F0 == 1.0 and abs(Finf - 0.5) < 1e-12 and abs(F - 0.710) <= 0.005,
          f"F(0) = {F0!r}, F(inf) = {Finf!r}, F(3.35 us) = {F:.4f} (0.710 +- 0.005, T2 = {T2 * 1e6:.3f} us)")


def test_06_closed_form_optimisation():
    worst = 0.0
    for B in 2 * math.pi * np.geomspace(1e6, 1e10, 5):
        for tau in np.geomspace(100e-6, 1e-3, 5):
            W, E = bd.optimize_rabi(B, math.inf, tau, model="two_term")
            worst = max(worst, abs(W / bd.omega_opt(B, tau) - 1), abs(E / bd.e_min(B, tau) - 1))
    check(6, worst <= 1e-6, f"max relative deviation over 5x5 grid = {worst:.2e} (1e-6)")


def test_07_intrinsic_anchor(anchor):
    B, tau = anchor["derived"]["b_rad_s"], anchor["inputs"]["tau_s"]
    E = bd.e_min(B, tau)
    W = bd.omega_opt(B, tau) / (2 * math.pi * 1e6)
    E23 = bd.e_min(ghz(2.3), tau)
    ok = abs(E / 5.5e-5 - 1) <= 0.05 and abs(E23 / 5.5e-5 - 1) <= 0.05 and 26 <= W <= 32
    check(7, ok, f"B/2pi = {B / 2 / math.pi / 1e9:.4f} GHz: E_min = {E:.3e}, at 2.3 GHz {E23:.3e} (5.5e-5 +- 5%); "
                 f"Omega_opt/2pi = {W:.2f} MHz in [26, 32]")


def test_08_spontaneous_emission(cfg_150):
    p5 = bd.spont_emission_prob_detuned(1 / 27.7e-9, ghz(37))
    p6 = bd.spont_emission_prob_detuned(1 / 125e-9, ghz(20))
    p6cfg = bd.assemble_budget(cfg_150).p_se
    ok = abs(p5 / 2.4e-4 - 1) < 0.02 and 1 / 1.5 <= p5 / 3e-4 <= 1.5 and abs(p6 / 1e-4 - 1) <= 0.2 and abs(p6cfg / 1e-4 - 1) <= 0.2
    check(8, ok, f"5p route {p5:.3e} (2.4e-4, ratio to 3e-4 = {p5 / 3e-4:.2f}); 6p route {p6:.3e}, config {p6cfg:.3e} (1e-4 +- 20%)")


def test_09_doppler_excitation():
    W = mhz(30)
    eps = bd.doppler_excitation_error(W, 100e-6, M, K_CO)
    lead = bd.doppler_excitation_error_leading(W, 100e-6, M, K_CO)
    check(9, eps < 1e-5 and abs(eps / lead - 1) <= 0.2, f"eps = {eps:.3e} (< 1e-5), leading order {lead:.3e} ({eps / lead - 1:+.2%})")


def test_10_ideal_gate_identities():
    ideal = dy.GateParams(mhz(30), math.inf, math.inf, math.inf)
    worst = 0.0
    for seq in (dy.cz_sequence(), dy.cnot_hadamard_variant(), dy.cnot_amplitude_swap()):
        S = dy.sequence_superoperator(ideal, seq)
        A = dy.align_global_phase(dy.computational_map(S), seq.ideal_map)
        # compare up to the global phase, against the textbook matrices
        ref = np.diag([1, -1, -1, -1]) if seq.name == "cz" else dy.CNOT
        A = A * np.conj(seq.ideal_map[0, 0]) / abs(seq.ideal_map[0, 0])
        worst = max(worst, np.max(np.abs(A - ref)))
        for c, t in ((0, 0), (0, 1), (1, 0), (1, 1)):
            if seq.name == "cz":
                continue
            out = dy.apply_superoperator(S, dy.dm(dy.ket(c, t)))
            worst = max(worst, 1 - dy.state_fidelity(out, dy.ket(c, t ^ c)))
    check(10, worst < 1e-9, f"max entry / truth-table deviation = {worst:.1e} (1e-9)")


@pytest.mark.slow
def test_11_eq2_reproduction():
    W = mhz(1)
    t0 = time.perf_counter()
    worst, n_dom, lines = 0.0, 0, []
    for r in (0.02, 0.05, 0.1):
        for wt in (1e3, 1e4):
            for h in (50, 200):
                p = dy.GateParams(W, W / r, wt / W, h * W)
                terms = bd.gate_error_terms(p.omega, p.B, p.omega_hf, p.tau)
                groups = {"radiative": sum(terms[:3]), "blockade": terms[3], "hyperfine": terms[4]}
                name, dom = max(groups.items(), key=lambda kv: kv[1])
                if dom <= 3 * (sum(terms) - dom):
                    continue
                n_dom += 1
                E = dy.gate_error(p, dy.cz_sequence(), phase_corrected=True)
                dev = abs(E / dom - 1)
                worst = max(worst, dev)
                lines.append(f"{name}@({r},{wt:g},{h}):{dev:.1%}")
    elapsed = time.perf_counter() - t0
    check(11, n_dom > 0 and worst <= 0.3 and elapsed < 600,
          f"{n_dom} dominated grid points, max deviation from dominant term {worst:.1%} (30%); {elapsed:.0f} s")


def test_12_budget_synthesis(cfg_150):
    r = bd.assemble_budget(cfg_150)
    ok = r.intrinsic_error < 1e-4 and r.p_se < 1e-4 and r.doppler_excitation_error < 1e-4 and r.dephasing_error < 1e-3
    check(12, ok, f"intrinsic {r.intrinsic_error:.2e}, P_se {r.p_se:.2e}, Doppler {r.doppler_excitation_error:.2e} "
                  f"(each < 1e-4); dephasing at t_gap {r.dephasing_error:.2e} (< 1e-3)")


def test_13_parity_machinery():
    phases = np.linspace(0, math.pi, 16, endpoint=False)
    b1 = np.array([1, 0, 0, 1]) / math.sqrt(2)
    perfect = mc.parity_scan(dy.dm(b1), phases, 10000, seed=13)
    freq = mc.fit_parity(np.linspace(0, 2 * math.pi, 64, endpoint=False),
                         mc.parity_scan(dy.dm(b1), np.linspace(0, 2 * math.pi, 64, endpoint=False), 10000, seed=14).parity,
                         frequency=None).frequency
    rho = np.diag([0.5, 0, 0, 0.5]).astype(complex)
    rho[0, 3] = rho[3, 0] = 0.21
    damped = mc.parity_scan(rho, phases, 10000, seed=15)
    est_err = 0.0
    for p00, p11, c in ((0.5, 0.5, 1.0), (0.45, 0.45, 0.42), (0.3, 0.6, 0.8), (0.25, 0.25, 0.0)):
        r = np.diag([p00, (1 - p00 - p11) / 2, (1 - p00 - p11) / 2, p11]).astype(complex)
        r[0, 3] = r[3, 0] = c * math.sqrt(p00 * p11)
        est_err = max(est_err, abs(mc.extract_fidelity(p00, p11, 2 * abs(r[0, 3])) - dy.state_fidelity(r, b1)))
    ok = (abs(perfect.fit.amplitude - 1) <= 0.02 and abs(freq - 2) <= 0.02 and est_err < 1e-12
          and abs(damped.fit.amplitude - 0.42) <= 0.02)
    check(13, ok, f"B1 amplitude {perfect.fit.amplitude:.3f}, fitted frequency {freq:.3f} (2 means period pi); "
                  f"estimator error {est_err:.1e}; damped amplitude {damped.fit.amplitude:.3f} (0.42 +- 0.02)")


def test_14_determinism_and_scaling(cfg_97d, tmp_path):
    same = True
    for argv in (("ramsey", "--config", "ramsey_97d", "--shots", "2000"),
                 ("simulate-bell", "--config", "ramsey_97d", "--shots", "2000", "--gap-us", "3"),
                 ("parity", "--shots", "2000")):
        outs = []
        for k in range(2):
            f = tmp_path / f"{argv[0]}-{k}.csv"
            assert run([*argv, "--seed", "99", "--out", str(f)]) == 0
            outs.append(f.read_bytes())
        same &= outs[0] == outs[1]
    ses = []
    for n in (1000, 10000, 100000):
        s = mc.draw_shots(cfg_97d, n, np.random.default_rng(n))
        ses.append(mc.envelope(mc.stochastic_phase(s, 3e-6, cfg_97d))[1])
    ratios = [a / b for a, b in zip(ses, ses[1:])]
    ok = same and all(abs(r / math.sqrt(10) - 1) < 0.1 for r in ratios)
    check(14, ok, f"byte-identical reruns: {same}; error ratios per 10x shots {ratios[0]:.3f}, {ratios[1]:.3f} (sqrt(10) = 3.162)")
