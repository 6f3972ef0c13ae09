"""Tests for the online (adaptive) beamformers and their driver."""

import numpy as np
import pytest

import rzfbeam as rb
from rzfbeam import adaptive as ad, beamformers as bf, covariance as cv
from rzfbeam._kernels import fallback
from rzfbeam.theory import mse_closed_form

from conftest import random_scenario


def _toy(n=8, j=3, **kw):
    return rb.build_toy(n, j, rho=kw.pop("rho", 0.6), **kw)


def test_ddaa_state_initialize():
    scen, _ = _toy()
    h0, h_int = scen.desired_channel, scen.interference_channels
    state = ad.DdaaState.initialize(h0, h_int, leakage_budget=0.4)
    np.testing.assert_allclose(state.weights, h0 / np.real(np.vdot(h0, h0)),
                               atol=1e-14)
    # the dual-ball radius is the budget expressed for max-normalized channels
    np.testing.assert_allclose(state.epsilon * state.sigma_max**2, 0.4,
                               rtol=1e-12)
    s = np.linalg.svd(state.normalized_channels, compute_uv=False)
    np.testing.assert_allclose(s[0], 1.0, rtol=1e-12)

    with pytest.raises(ValueError):
        ad.DdaaState.initialize(h0, h_int, leakage_budget=-0.1)
    with pytest.raises(ValueError):
        ad.DdaaState.initialize(h0, h_int, leakage_budget=0.4, step=0.0)
    with pytest.raises(ValueError):
        ad.DdaaState.initialize(h0, h_int, leakage_budget=0.4, alpha=1.5)


def test_ddaa_step_stays_distortionless():
    rng = np.random.default_rng(50)
    scen, _ = _toy()
    h0 = scen.desired_channel
    state = ad.DdaaState.initialize(h0, scen.interference_channels, 0.3)
    for _ in range(200):
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        state = ad.ddaa_step(state, y)
        assert abs(np.vdot(state.weights, h0) - 1.0) < 1e-12


def test_ddaa_step_matches_reference_update():
    rng = np.random.default_rng(51)
    scen, _ = _toy()
    h0 = scen.desired_channel
    state = ad.DdaaState.initialize(h0, scen.interference_channels, 0.25,
                                    step=0.3, alpha=0.7)
    w_ref = state.weights.copy()
    h0_nsq = float(np.real(np.vdot(h0, h0)))
    for _ in range(50):
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        state = ad.ddaa_step(state, y)
        w_ref = fallback.ddaa_update(w_ref, y, h0, h0_nsq,
                                     state.normalized_channels, state.epsilon,
                                     0.3, 0.7)
        np.testing.assert_allclose(state.weights, w_ref, atol=1e-13)


def test_ddaa_stationary_when_both_goals_met():
    # zero projected output and leakage inside the ball: no displacement
    scen, _ = _toy()
    h0 = scen.desired_channel
    state = ad.DdaaState.initialize(h0, scen.interference_channels,
                                    leakage_budget=10.0)
    w_before = state.weights.copy()
    state = ad.ddaa_step(state, 3.7 * h0)  # snapshot parallel to h0
    np.testing.assert_array_equal(state.weights, w_before)


def test_ddaa_pure_projection_enters_the_ball():
    # alpha = 0 removes the data-driven pull; the iteration is a projection
    # scheme that settles inside the leakage ball
    scen, models = _toy(rho=0.6)
    h0, h_int = scen.desired_channel, scen.interference_channels
    start = bf.leakage(h0 / np.real(np.vdot(h0, h0)), h_int)
    budget = 0.25 * start  # the matched filter starts outside this ball
    state = ad.DdaaState.initialize(h0, h_int, budget, step=0.5, alpha=0.0)
    rng = np.random.default_rng(52)
    leak = start
    for _ in range(500):
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        state = ad.ddaa_step(state, y)
        new_leak = bf.leakage(state.weights, h_int)
        assert new_leak <= leak + 1e-12  # monotone while outside
        leak = new_leak
        if leak <= budget:
            break
    assert bf.leakage(state.weights, h_int) <= budget * (1.0 + 1e-6)


def test_ddaa_step_scale_factor_at_least_one():
    # the adaptive scale eta = (a*|g1|^2 + (1-a)*|g2|^2) / |a*g1 + (1-a)*g2|^2
    # is >= 1 by convexity; recompute it from the implemented update
    rng = np.random.default_rng(53)
    scen, _ = _toy()
    h0 = scen.desired_channel
    h0_nsq = float(np.real(np.vdot(h0, h0)))
    state = ad.DdaaState.initialize(h0, scen.interference_channels, 0.05,
                                    step=1.0, alpha=0.4)
    w = state.weights.copy()
    for _ in range(100):
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        # reconstruct the two displacements
        wy = np.vdot(w, y)
        qy = y - h0 * (np.vdot(h0, y) / h0_nsq)
        yqy = np.real(np.vdot(qy, qy))
        g1 = -np.conj(wy) / yqy * qy if yqy > 0 else np.zeros_like(w)
        u = state.normalized_channels.conj().T @ w
        u_nsq = np.real(np.vdot(u, u))
        if u_nsq > state.epsilon:
            fac = np.sqrt(state.epsilon / u_nsq) - 1.0
            v = state.normalized_channels @ (fac * u)
            g2 = v - h0 * (np.vdot(h0, v) / h0_nsq)
        else:
            g2 = np.zeros_like(w)
        g = 0.4 * g1 + 0.6 * g2
        g_nsq = np.real(np.vdot(g, g))
        w_next = fallback.ddaa_update(w, y, h0, h0_nsq,
                                      state.normalized_channels, state.epsilon,
                                      1.0, 0.4)
        if g_nsq > 1e-12:
            eta = np.real(np.vdot(w_next - w, w_next - w)) / g_nsq
            assert eta >= 1.0 - 1e-9
        w = w_next


def test_cnlms_modes_and_projector():
    scen, _ = _toy()
    h0 = scen.desired_channel

    state = ad.CnlmsState.mvdr_mode(h0)
    np.testing.assert_allclose(state.constraint_targets, [1.0 + 0.0j])
    assert state.constraint_channels.shape == (8, 1)

    state = ad.CnlmsState.zf_mode(scen.channels)
    expected = np.zeros(4, dtype=complex)
    expected[0] = 1.0
    np.testing.assert_allclose(state.constraint_targets, expected)

    p = state.projector
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(p, p.conj().T, atol=1e-12)
    np.testing.assert_allclose(
        state.constraint_channels.conj().T @ state.feasible_point,
        state.constraint_targets, atol=1e-12)
    # the initial weights are the feasible point itself
    np.testing.assert_allclose(state.weights, state.feasible_point, atol=1e-14)


def test_cnlms_rejects_rank_deficient_constraints():
    h = np.ones((4, 2), dtype=complex) / 2.0
    with pytest.raises(np.linalg.LinAlgError):
        ad.CnlmsState.zf_mode(h)


def test_cnlms_step_keeps_constraints_and_matches_reference():
    rng = np.random.default_rng(54)
    scen, _ = _toy()
    state = ad.CnlmsState.zf_mode(scen.channels, step=0.4)
    w_ref = state.weights.copy()
    for _ in range(100):
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        state = ad.cnlms_step(state, y)
        w_ref = fallback.cnlms_update(w_ref, y, state.projector,
                                      state.feasible_point, 0.4, 1e-12)
        np.testing.assert_allclose(state.weights, w_ref, atol=1e-13)
        dev = np.abs(state.constraint_channels.conj().T @ state.weights
                     - state.constraint_targets)
        assert dev.max() < 1e-12


def test_trailing_mean():
    rng = np.random.default_rng(55)
    x = rng.standard_normal(300)
    out = ad.trailing_mean(x, 30)
    assert out.shape == x.shape
    # oracle: mean over the trailing window, clipped at the start
    for k in (0, 5, 29, 30, 150, 299):
        lo = max(0, k - 30 + 1)
        np.testing.assert_allclose(out[k], x[lo:k + 1].mean(), rtol=1e-12)
    np.testing.assert_allclose(ad.trailing_mean(x, 1), x, rtol=1e-12)
    # window longer than the array: running mean of everything so far
    short = x[:10]
    np.testing.assert_allclose(ad.trailing_mean(short, 50),
                               np.cumsum(short) / np.arange(1, 11), rtol=1e-12)
    with pytest.raises(ValueError):
        ad.trailing_mean(x, 0)


def test_run_online_shapes_and_determinism():
    scen, models = _toy()
    res = rb.run_online("cnlms_mvdr", scen, models, 400, 5, 123)
    assert res.algorithm == "cnlms_mvdr"
    assert res.mean_squared_error.shape == (400,)
    assert res.smoothed.shape == (400,)
    assert res.final_weights.shape == (5, 8)
    assert res.n_trials == 5
    assert res.backend in ("compiled", "fallback")
    assert res.max_nulling_residual is None
    assert res.max_distortionless_error < 1e-9

    again = rb.run_online("cnlms_mvdr", scen, models, 400, 5, 123)
    np.testing.assert_array_equal(res.mean_squared_error,
                                  again.mean_squared_error)
    other = rb.run_online("cnlms_mvdr", scen, models, 400, 5, 124)
    assert np.abs(res.mean_squared_error - other.mean_squared_error).max() > 0


def test_run_online_argument_errors():
    scen, models = _toy()
    with pytest.raises(ValueError, match="leakage_budget"):
        rb.run_online("ddaa", scen, models, 10, 1, 0)
    with pytest.raises(ValueError, match="unknown algorithm"):
        rb.run_online("rls", scen, models, 10, 1, 0)
    with pytest.raises(ValueError):
        rb.run_online("cnlms_mvdr", scen, models, -1, 1, 0)
    with pytest.raises(ValueError):
        rb.run_online("cnlms_mvdr", scen, models, 10, 0, 0)


def test_run_online_zero_iterations():
    scen, models = _toy()
    res = rb.run_online("ddaa", scen, models, 0, 2, 5, leakage_budget=0.3)
    assert res.mean_squared_error.shape == (0,)
    h0 = scen.desired_channel
    np.testing.assert_allclose(res.final_weights,
                               np.tile(h0 / np.real(np.vdot(h0, h0)), (2, 1)),
                               atol=1e-14)


def test_cnlms_zf_nulls_throughout():
    scen, models = _toy()
    res = rb.run_online("cnlms_zf", scen, models, 600, 4, 9)
    assert res.max_nulling_residual < 1e-9
    assert res.max_distortionless_error < 1e-9


def test_online_steady_state_tracks_batch_references():
    scen, models = rb.build_toy(16, 7, rho=0.6, snr_db=0.0, sir_db=0.0)
    cov = cv.analytic_covariance(scen)
    h0, h_int = scen.desired_channel, scen.interference_channels

    mvdr_db = 10 * np.log10(mse_closed_form(bf.mvdr(cov, h0).weights, scen))
    res = rb.run_online("cnlms_mvdr", scen, models, 3000, 50, 77)
    tail_db = 10 * np.log10(res.smoothed[-500:].mean())
    assert abs(tail_db - mvdr_db) < 2.0

    eps_m = bf.epsilon_mvdr(cov, h0, h_int)
    batch = bf.rzf_from_epsilon(cov, h0, h_int, eps_m / 2)[0].weights
    batch_db = 10 * np.log10(mse_closed_form(batch, scen))
    res = rb.run_online("ddaa", scen, models, 3000, 50, 77,
                        leakage_budget=eps_m / 2)
    tail_db = 10 * np.log10(res.smoothed[-500:].mean())
    assert tail_db - batch_db < 2.0


def test_ddaa_converges_faster_than_cnlms_mvdr():
    # a strong nearly-collinear interferer makes the matched-filter start far
    # from the steady state, so convergence speed becomes visible
    rng = np.random.default_rng(5)
    h0 = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    h0 /= np.linalg.norm(h0)
    g = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    g -= np.vdot(h0, g) * h0
    g /= np.linalg.norm(g)
    h1 = 0.85 * h0 + np.sqrt(1 - 0.85**2) * g
    scen, models = rb.build_from_channels(np.column_stack([h0, h1]),
                                          rho=0.1, snr_db=0.0, sir_db=-10.0)
    cov = cv.analytic_covariance(scen)
    eps_m = bf.epsilon_mvdr(cov, scen.desired_channel,
                            scen.interference_channels)

    def iterations_to_settle(result):
        curve = result.smoothed
        steady = curve[-200:].mean()
        within = curve <= steady * 10 ** 0.3  # within 3 dB of own tail
        return int(np.argmax(within))

    dd = rb.run_online("ddaa", scen, models, 4000, 60, 11,
                       leakage_budget=eps_m / 2, step=0.05)
    cm = rb.run_online("cnlms_mvdr", scen, models, 4000, 60, 11, step=0.05)
    # both descend by an order of magnitude ...
    assert dd.smoothed[0] > 10 * dd.smoothed[-200:].mean()
    assert cm.smoothed[0] > 10 * cm.smoothed[-200:].mean()
    # ... and the dual-domain algorithm settles strictly sooner
    assert iterations_to_settle(dd) < iterations_to_settle(cm)


def test_run_online_random_scenarios_smoke():
    rng = np.random.default_rng(56)
    for _ in range(3):
        scen, models = random_scenario(rng, n_sensors=6, n_interferers=2)
        for algo, kw in (("ddaa", {"leakage_budget": 0.5}),
                         ("cnlms_mvdr", {}), ("cnlms_zf", {})):
            res = rb.run_online(algo, scen, models, 150, 2, 3, **kw)
            assert np.isfinite(res.mean_squared_error).all()
            assert res.max_distortionless_error < 1e-9
