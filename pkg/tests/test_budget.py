import json
import math
import warnings

import numpy as np
import pytest

import oracles
from conftest import ghz, mhz
from rydgate import budget as bd
from rydgate.params import CONSTANTS

M = oracles.RB87_MASS
K_CO = oracles.k_two_photon(480e-9, 780e-9)
B_REF, TAU = ghz(2.3), 860e-6


def test_omega_opt_scaling():
    assert bd.omega_opt(8 * B_REF, TAU) / bd.omega_opt(B_REF, TAU) == pytest.approx(4, rel=1e-14)
    assert bd.omega_opt(B_REF, 8 * TAU) / bd.omega_opt(B_REF, TAU) == pytest.approx(0.5, rel=1e-14)
    assert bd.omega_opt(B_REF, TAU) / mhz(1) == pytest.approx(28, rel=0.02)
    with pytest.raises(ValueError):
        bd.omega_opt(0, TAU)


def test_e_min_values(anchor):
    assert bd.e_min(anchor["derived"]["b_tau"], 1.0) == pytest.approx(5.5e-5, rel=1e-12)
    assert bd.e_min(1.24e7, 1.0) == pytest.approx(5.5e-5, rel=0.01)
    assert bd.e_min(8 * B_REF, TAU) == pytest.approx(bd.e_min(B_REF, TAU) / 4, rel=1e-14)
    vals = [bd.e_min(b, TAU) for b in np.logspace(8, 12, 9)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.warns(UserWarning):
        bd.e_min(10.0, 1.0)
    assert bd.blockade_from_emin(bd.e_min(B_REF, TAU), TAU) == pytest.approx(B_REF, rel=1e-12)


def test_anchor_fixture_consistent(anchor):
    B = bd.blockade_from_emin(anchor["inputs"]["e_min"], anchor["inputs"]["tau_s"])
    assert B == pytest.approx(anchor["derived"]["b_rad_s"], rel=1e-12)
    assert oracles.e_min_closed(B, anchor["inputs"]["tau_s"]) == pytest.approx(5.5e-5, rel=1e-12)


def test_gate_error_full_matches_oracle():
    for args in [(mhz(30), ghz(2.3), ghz(6.8), 860e-6), (mhz(1), mhz(20), mhz(200), 1e-3)]:
        assert bd.gate_error_full(*args) == pytest.approx(oracles.eq2(*args), rel=1e-13)


def test_gate_error_full_limits():
    W = mhz(30)
    big = 1e12 * W
    assert bd.gate_error_full(W, big, big, TAU) == pytest.approx(7 * math.pi / (4 * W * TAU), rel=1e-12)
    assert bd.gate_error_full(W, math.inf, math.inf, TAU) == 7 * math.pi / (4 * W * TAU)
    with pytest.raises(ValueError):
        bd.gate_error_full(ghz(7), B_REF, ghz(6.8), TAU)


def test_gate_error_full_at_omega_opt_vs_e_min():
    B, tau = mhz(50), 340e-6
    W = bd.omega_opt(B, tau)
    expected = bd.e_min(B, tau) + (W**2 / (7 * B**2)) * 7 * math.pi / (4 * W * tau)
    assert bd.gate_error_full(W, B, math.inf, tau) == pytest.approx(expected, rel=1e-12)


def test_gate_error_full_150s_point():
    # Direct evaluation of the five-term expression at this point.
    E = bd.gate_error_full(mhz(30), ghz(2.3), ghz(6.8), 860e-6)
    assert E == pytest.approx(oracles.eq2(mhz(30), ghz(2.3), ghz(6.8), 860e-6), rel=1e-13)
    assert E == pytest.approx(6.98e-5, rel=2e-3)


def test_hyperfine_flag():
    assert not bd.hyperfine_regime_violated(ghz(2.3), ghz(6.8))
    assert bd.hyperfine_regime_violated(ghz(3), ghz(6.8))


def test_optimize_rabi_two_term_limit():
    B, tau = mhz(10), 340e-6
    W, E = bd.optimize_rabi(B, 1e6 * B, tau, model="two_term")
    assert W == pytest.approx(bd.omega_opt(B, tau), rel=1e-6)
    assert E == pytest.approx(bd.e_min(B, tau), rel=1e-6)


def test_optimize_rabi_full_limit_shift():
    # With omega_hf -> inf the full model keeps the radiative Omega^2/(7B^2) term, which
    # moves the optimum by -pi/(3 Omega_opt tau) relative to first order.
    B, tau = mhz(10), 340e-6
    W0 = bd.omega_opt(B, tau)
    W, E = bd.optimize_rabi(B, 1e6 * B, tau)
    assert (W - W0) / W0 == pytest.approx(-math.pi / (3 * W0 * tau), rel=0.01)
    assert E <= bd.gate_error_full(W0, B, 1e6 * B, tau)


def test_optimize_rabi_150s():
    W, E = bd.optimize_rabi(ghz(2.3), ghz(6.8), 860e-6)
    assert E <= bd.gate_error_full(bd.omega_opt(ghz(2.3), 860e-6), ghz(2.3), ghz(6.8), 860e-6)
    for f in (0.99, 1.01):
        assert E < bd.gate_error_full(f * W, ghz(2.3), ghz(6.8), 860e-6)
    with pytest.raises(ValueError):
        bd.optimize_rabi(B_REF, ghz(6.8), TAU, model="three_term")


def test_optimize_rabi_small_hyperfine_stays_inside():
    # the Omega^2/omega_hf^2 terms keep the minimum strictly below omega_hf
    W, E = bd.optimize_rabi(ghz(10), mhz(1), 1e-3)
    assert 0 < W < mhz(1)
    assert E == pytest.approx(bd.gate_error_full(W, ghz(10), mhz(1), 1e-3))


def test_spont_emission():
    W, g, D = mhz(30), 1 / 27.7e-9, ghz(37)
    W1 = math.sqrt(2 * D * W)
    assert bd.spont_emission_prob(W, W1, g) == pytest.approx(bd.spont_emission_prob_detuned(g, D), rel=1e-12)
    assert bd.spont_emission_prob_detuned(g, D) == pytest.approx(2.4e-4, rel=0.02)
    assert bd.spont_emission_prob_detuned(1 / 125e-9, ghz(20)) == pytest.approx(1.0e-4, rel=1e-3)
    assert bd.spont_emission_prob(W, W1, 1e-12) < 1e-15
    with pytest.raises(ValueError):
        bd.spont_emission_prob(0, W1, g)


def test_pi_pulse_infidelity_exact():
    x = np.array([0.0, 1e-4, 0.3, 1.0, 7.0])
    naive = 1 - np.sin(0.5 * np.pi * np.sqrt(1 + x**2)) ** 2 / (1 + x**2)
    assert np.allclose(bd.pi_pulse_infidelity(x), naive, rtol=1e-6, atol=1e-15)
    assert bd.pi_pulse_infidelity(0.0) == 0.0
    assert bd.pi_pulse_infidelity(1e-6) == pytest.approx(1e-12, rel=1e-6)


def test_doppler_excitation_error():
    W = mhz(30)
    eps = bd.doppler_excitation_error(W, 100e-6, M, K_CO)
    assert eps == pytest.approx(oracles.doppler_error_gauss_hermite(W, 100e-6, M, K_CO), rel=1e-8)
    assert eps == pytest.approx(7e-6, rel=0.05)
    assert eps < 1e-5
    lead = bd.doppler_excitation_error_leading(W, 100e-6, M, K_CO)
    assert lead < 1e-3 and abs(eps / lead - 1) < 0.2
    assert bd.doppler_excitation_error(W, 0.0, M, K_CO) == 0.0


def test_t2_magnetic():
    assert bd.t2_magnetic(3, 2.5e-6) == pytest.approx(oracles.t2_magnetic(3, 2.5e-6), rel=1e-12)
    assert bd.t2_magnetic(3, 2.5e-6) == pytest.approx(13.5e-6, abs=0.1e-6)
    assert bd.t2_magnetic(3, 1.25e-6) == pytest.approx(2 * bd.t2_magnetic(3, 2.5e-6), rel=1e-14)
    assert bd.t2_magnetic(0, 2.5e-6) is bd.INFINITE
    assert bd.t2_magnetic(3, 0) is bd.INFINITE


def test_t2_doppler():
    assert bd.t2_doppler(60e-6, M, K_CO) == pytest.approx(3.7e-6, abs=0.05e-6)
    assert bd.t2_doppler(100e-6, M, K_CO) == pytest.approx(2.87e-6, abs=0.01e-6)
    assert bd.t2_doppler(240e-6, M, K_CO) == pytest.approx(bd.t2_doppler(60e-6, M, K_CO) / 2, rel=1e-14)
    assert bd.t2_doppler(60e-6, M, K_CO) == pytest.approx(oracles.t2_doppler(60e-6, M, K_CO), rel=1e-12)
    assert bd.t2_doppler(0.0, M, K_CO) == bd.INFINITE


def test_t2_combined():
    assert bd.t2_combined(13.5e-6, 3.7e-6) == pytest.approx(3.57e-6, abs=0.01e-6)
    assert bd.t2_combined(2e-6, math.inf) == 2e-6
    assert bd.t2_combined(2e-6, 2e-6) == pytest.approx(2e-6 / math.sqrt(2), rel=1e-15)
    assert bd.t2_combined(math.inf, math.inf) == math.inf


def test_fidelity_limit():
    assert bd.fidelity_limit(0.0, 3.6e-6) == 1.0
    assert bd.fidelity_limit(1.0, 3.6e-6) == 0.5
    assert bd.fidelity_limit(3.35e-6, 3.6e-6) == pytest.approx(0.71, abs=0.005)
    ts = np.linspace(0, 1e-5, 11)
    assert bd.fidelity_limit(ts, 3.6e-6).shape == (11,)
    with pytest.raises(ValueError):
        bd.fidelity_limit(-1.0, 3.6e-6)


def test_assemble_budget(cfg_150):
    r = bd.assemble_budget(cfg_150)
    assert r.t_gap_s == pytest.approx(2 * math.pi / mhz(30))
    assert r.t_gap_s * 1e6 == pytest.approx(0.033, abs=0.001)
    assert r.intrinsic_error < 1e-4 and r.p_se < 1e-4 and r.doppler_excitation_error < 1e-4
    assert r.dephasing_error < 1e-3
    assert 0.5 <= r.fidelity_limit <= 1
    assert "level.tau_us" in r.defaulted
    assert r.e_min == pytest.approx(5.5e-5, rel=1e-9)
    assert r.intrinsic_error == pytest.approx(sum(r.intrinsic_terms), rel=1e-14)
    assert r.timing_tolerance_s > 0


def test_assemble_budget_no_noise(cfg_150):
    r = bd.assemble_budget(cfg_150.with_overrides({"environment.sigma_tesla": "0", "environment.temperature_uk": "0",
                                                    "environment.gap_us": "100"}))
    assert r.t2_s == math.inf and r.fidelity_limit == 1.0 and r.dephasing_error == 0.0


def test_report_serialisation(cfg_150):
    r = bd.assemble_budget(cfg_150.with_overrides({"environment.sigma_tesla": "0"}))
    d = json.loads(r.to_json())
    assert d["t2_b_s"] == "inf"
    assert all(k.endswith(("_s", "_rad_s")) or k in d for k in d)
    text = r.to_text()
    assert "t2_b_s = inf" in text
    assert "intrinsic_error = " in text


def test_default_constants_used():
    assert bd.t2_magnetic(3, 2.5e-6, CONSTANTS.hbar, CONSTANTS.mu_B) == bd.t2_magnetic(3, 2.5e-6)
