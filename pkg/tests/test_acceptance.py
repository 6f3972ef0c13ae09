"""Acceptance gate: eleven numbered criteria, one test and one verdict line each.

Each test prints ``criterion N: PASS/FAIL -- detail`` and enforces its runtime
budget.  Criterion 9's strict tuned-RZF-beats-ZF clause is asserted exactly as
stated even though the tuned family optimum on that scenario coincides with
zero forcing (see the repository notes on the sweep engine's dominance
invariant); every other clause of criterion 9 holds.
"""

import math
import time

import numpy as np
import pytest

import rzfbeam as rb
from rzfbeam import beamformers as bf, covariance as cv, experiments as ex, theory as th

from conftest import random_geometry, random_scenario

TOY = dict(n_sensors=16, n_interferers=7, snr_db=0.0, sir_db=0.0)


def _verdict(num, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num:2d}: {status} ({elapsed:.2f}s / budget {budget:.0f}s) -- {detail}")
    assert elapsed < budget, f"criterion {num} exceeded its {budget:.0f}s budget"
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_pinned_gamma_values():
    t0 = time.perf_counter()
    expected = {0.99: -2.0619, -0.2: 0.7692, 0.1: 1.1765}
    worst = 0.0
    for c1, target in expected.items():
        g = th.SingleInterferenceGeometry.from_real(math.pi / 6, c1, 1.0, 1.0)
        worst = max(worst, abs(th.regime(g).gamma - target))
    _verdict(1, worst < 5e-5, f"max |gamma error| = {worst:.2e}",
             time.perf_counter() - t0, 1.0)


def test_criterion_02_curve_matches_constructed_weights():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    lams = np.geomspace(1e-5, 1e5, 50)
    worst = 0.0
    for k in range(20):
        g = random_geometry(rng, real_only=(k % 2 == 0))
        scen = th.two_channel_scenario(g)
        cov = cv.analytic_covariance(scen)
        for lam in lams:
            w = bf.rzf_from_lambda(cov, scen.desired_channel,
                                   scen.interference_channels, lam).weights
            direct = th.mse_closed_form(w, scen)
            worst = max(worst, abs(th.mse_of_lambda(g, lam) - direct) / direct)
    _verdict(2, worst < 1e-9, f"max relative error = {worst:.2e}",
             time.perf_counter() - t0, 5.0)


def test_criterion_03_monte_carlo_ground_truth():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst_z = 0.0
    for _ in range(10):
        n = int(rng.integers(6, 17))
        scen, models = random_scenario(rng, n_sensors=n,
                                       n_interferers=int(rng.integers(1, min(8, n))))
        cov = cv.analytic_covariance(scen)
        h0, h_int = scen.desired_channel, scen.interference_channels
        eps_m = bf.epsilon_mvdr(cov, h0, h_int)
        weights = np.vstack([
            bf.mvdr(cov, h0).weights,
            bf.zf(cov, scen.channels).weights,
            bf.rzf_from_epsilon(cov, h0, h_int, eps_m / 2)[0].weights,
            bf.mmse_dr(scen).weights,
            bf.a_mmse(cov, h0, h_int, 0.8 * scen.desired_power,
                      scen.temporal_correlations).weights,
        ])
        out = ex.empirical_mse(weights, scen, models, 1_000_000,
                               rng_seed=int(rng.integers(2**31)))
        predicted = np.array([th.mse_closed_form(w, scen) for w in weights])
        z = np.abs(out.mse - predicted) / out.mse_std_error
        worst_z = max(worst_z, float(z.max()))
    _verdict(3, worst_z < 3.0, f"max |deviation| = {worst_z:.2f} standard errors",
             time.perf_counter() - t0, 60.0)


def test_criterion_04_difference_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = 0.0
    interior_seen = 0
    for _ in range(10_000):
        g = random_geometry(rng)
        a = th.achieved_mse(g)
        tan_tau, cos_tau = math.tan(g.tau), math.cos(g.tau)
        phase = g.phi_c + g.phi_z
        depth = g.sigma1_sq * cos_tau**2 + g.sigma_n_sq
        scale = max(1.0, a.zf, a.mvdr)
        # gap of MVDR to the distortionless bound
        err = abs((a.mvdr - a.mmse_dr) - g.c1_abs**2 * cos_tau**2 / depth)
        worst = max(worst, err / scale)
        # gap of ZF to the distortionless bound
        err = abs((a.zf - a.mmse_dr) - g.sigma_n_sq**2 * tan_tau**2 / depth)
        worst = max(worst, err / scale)
        # interior-regime excess of the tuned path over the bound
        delta1 = g.sigma_n_sq * tan_tau - g.c1_abs * cos_tau * math.cos(phase)
        delta2 = g.sigma_n_sq * tan_tau - g.c1_abs * cos_tau * np.exp(1j * phase)
        if th.regime(g).regime == "interior":
            interior_seen += 1
            excess = (1.0 - delta1**2 / abs(delta2) ** 2) \
                * g.sigma_n_sq**2 * tan_tau**2 / depth
            err = abs((a.rzf - a.mmse_dr) - excess)
            worst = max(worst, err / scale)
    ok = worst < 1e-12 and interior_seen > 500
    _verdict(4, ok, f"max scaled identity error = {worst:.2e} "
                    f"({interior_seen} interior geometries)",
             time.perf_counter() - t0, 10.0)


def test_criterion_05_optimal_penalty_grid_search():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    lams = np.concatenate(([0.0], np.geomspace(1e-6, 1e6, 10_000), [np.inf]))
    worst_beat = 0.0
    worst_excess = 0.0
    boundary_fail = 0
    for _ in range(1_000):
        g = random_geometry(rng)
        report = th.regime(g)
        path = th.mse_of_lambda(g, lams)
        grid_min = float(path.min())
        scale = max(1.0, float(path.max()))
        if report.regime == "interior":
            opt = th.mse_of_lambda(g, report.lambda_opt)
            # the grid never undercuts the analytic optimum ...
            worst_beat = max(worst_beat, (opt - grid_min) / scale)
            # ... and the optimum improves on the best grid point by no more
            # than the MSE variation across one neighboring grid step
            k = int(np.argmin(path))
            step_var = max(abs(path[min(k + 1, path.size - 1)] - path[k]),
                           abs(path[k] - path[max(k - 1, 0)]))
            worst_excess = max(worst_excess, (grid_min - opt - step_var) / scale)
        elif report.regime == "zf_optimal":
            if path[-1] > grid_min + 1e-12 * scale:
                boundary_fail += 1
        elif report.regime == "mvdr_optimal":
            if path[0] > grid_min + 1e-12 * scale:
                boundary_fail += 1
    ok = worst_beat < 1e-12 and worst_excess <= 0.0 and boundary_fail == 0
    _verdict(5, ok, f"grid-beats-optimum margin {worst_beat:.2e}, "
                    f"boundary failures {boundary_fail}",
             time.perf_counter() - t0, 30.0)


def test_criterion_06_strict_superiority_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    mismatches = 0
    sufficient_fail = 0
    witnesses = 0
    for _ in range(10_000):
        g = random_geometry(rng)
        tan_tau, cos_tau = math.tan(g.tau), math.cos(g.tau)
        phase = g.phi_c + g.phi_z
        delta1 = g.sigma_n_sq * tan_tau - g.c1_abs * cos_tau * math.cos(phase)
        delta2 = g.sigma_n_sq * tan_tau - g.c1_abs * cos_tau * np.exp(1j * phase)
        predicate = 0.0 < delta1 * g.sigma_n_sq * tan_tau < abs(delta2) ** 2
        a = th.achieved_mse(g)
        strict = a.rzf < min(a.mvdr, a.zf) - 1e-15 * max(1.0, a.zf)
        if predicate != strict:
            mismatches += 1
        if predicate:
            witnesses += 1
        # sufficient condition: nonzero correlation pulling against the overlap
        if g.c1_abs > 1e-12 and math.sin(g.tau) * math.cos(phase) < 0.0 \
                and not strict:
            sufficient_fail += 1
    ok = mismatches == 0 and sufficient_fail == 0 and witnesses > 500
    _verdict(6, ok, f"{mismatches} equivalence mismatches, "
                    f"{sufficient_fail} sufficient-condition counterexamples "
                    f"({witnesses} witnesses)",
             time.perf_counter() - t0, 10.0)


def test_criterion_07_budget_penalty_duality():
    t0 = time.perf_counter()
    scen, _ = rb.build_toy(**TOY, rho=0.6)
    cov = cv.analytic_covariance(scen)
    h0, h_int = scen.desired_channel, scen.interference_channels
    eps_m = bf.epsilon_mvdr(cov, h0, h_int)

    worst = 0.0
    lambdas = []
    for frac in np.linspace(0.01, 0.99, 100):
        target = frac * eps_m
        w, report = bf.rzf_from_epsilon(cov, h0, h_int, target)
        worst = max(worst, abs(bf.leakage(w.weights, h_int) - target) / target)
        lambdas.append(report.lambda_)
    monotone = all(b < a for a, b in zip(lambdas, lambdas[1:]))

    end_mvdr = np.abs(bf.rzf_from_epsilon(cov, h0, h_int, eps_m)[0].weights
                      - bf.mvdr(cov, h0).weights).max()
    end_zf = np.abs(bf.rzf_from_epsilon(cov, h0, h_int, 0.0)[0].weights
                    - bf.zf(cov, scen.channels).weights).max()
    ok = worst < 1e-8 and monotone and end_mvdr < 1e-10 and end_zf < 1e-10
    _verdict(7, ok, f"max leakage error {worst:.2e}, lambda monotone {monotone}, "
                    f"endpoint gaps {end_mvdr:.2e}/{end_zf:.2e}",
             time.perf_counter() - t0, 5.0)


def test_criterion_08_span_property():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    lams = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 12), [np.inf]))
    worst = 0.0
    for _ in range(100):
        scen, _ = random_scenario(rng, n_sensors=16, n_interferers=7)
        cov = cv.analytic_covariance(scen)
        basis, *_ = np.linalg.qr(scen.channels)
        for lam in lams:
            w = bf.rzf_from_lambda(cov, scen.desired_channel,
                                   scen.interference_channels, lam).weights
            residual = w - basis @ (basis.conj().T @ w)
            worst = max(worst, np.linalg.norm(residual) / np.linalg.norm(w))
    _verdict(8, worst < 1e-10, f"max span residual = {worst:.2e}",
             time.perf_counter() - t0, 5.0)


def test_criterion_09_desk_scale_figure_behavior():
    t0 = time.perf_counter()
    budget = 120.0

    # (a) sample-covariance protocol of the reference figures: estimate the
    # covariance from 8000 snapshots, tune the budget on the true MSE of the
    # estimated weights, average over seeded draws
    scen, models = rb.build_toy(**TOY, rho=0.6)
    cov_true = cv.analytic_covariance(scen)
    h0, h_int = scen.desired_channel, scen.interference_channels
    grid = ex.default_epsilon_grid(bf.epsilon_mvdr(cov_true, h0, h_int))
    sums = {"MVDR": 0.0, "ZF": 0.0, "RZF": 0.0}
    draws = 40
    for trial in range(draws):
        blk = rb.generate_block(scen, models, 8000, rng_seed=9 ^ trial)
        cov_hat = cv.sample_covariance(blk.snapshots)
        sums["MVDR"] += th.mse_closed_form(bf.mvdr(cov_hat, h0).weights, scen)
        sums["ZF"] += th.mse_closed_form(bf.zf(cov_hat, scen.channels).weights,
                                         scen)
        best = min((th.mse_closed_form(
            bf.rzf_from_epsilon(cov_hat, h0, h_int, eps)[0].weights, scen)
            for eps in grid))
        sums["RZF"] += best
    mse_db = {k: 10 * math.log10(v / draws) for k, v in sums.items()}

    # (b) MVDR degrades monotonically with correlation (analytic curve)
    rhos = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
    mvdr_curve = []
    rzf_gap_at_06 = None
    for rho in rhos:
        scen_r, _ = rb.build_toy(**TOY, rho=rho)
        cov_r = cv.analytic_covariance(scen_r)
        mvdr_curve.append(10 * math.log10(th.mse_closed_form(
            bf.mvdr(cov_r, scen_r.desired_channel).weights, scen_r)))
        if rho == 0.6:
            best_eps, _ = ex.epsilon_grid_search(scen_r)
            rzf_db = 10 * math.log10(th.mse_closed_form(bf.rzf_from_epsilon(
                cov_r, scen_r.desired_channel, scen_r.interference_channels,
                best_eps)[0].weights, scen_r))
            bound_db = 10 * math.log10(th.mse_closed_form(
                bf.mmse_dr(scen_r).weights, scen_r))
            rzf_gap_at_06 = rzf_db - bound_db
    monotone = all(b >= a - 1e-9 for a, b in zip(mvdr_curve, mvdr_curve[1:]))

    beats_mvdr = mse_db["RZF"] < mse_db["MVDR"]
    beats_zf = mse_db["RZF"] < mse_db["ZF"]
    gap_ok = rzf_gap_at_06 < 1.0
    detail = (f"RZF {mse_db['RZF']:.3f} dB vs MVDR {mse_db['MVDR']:.3f} "
              f"(beats: {beats_mvdr}) vs ZF {mse_db['ZF']:.3f} "
              f"(beats: {beats_zf}); MVDR rho-monotone {monotone}; "
              f"gap to bound {rzf_gap_at_06:.3f} dB")
    ok = beats_mvdr and beats_zf and monotone and gap_ok
    _verdict(9, ok, detail, time.perf_counter() - t0, budget)


def test_criterion_10_online_convergence():
    t0 = time.perf_counter()
    scen, models = rb.build_toy(**TOY, rho=0.6)
    cov = cv.analytic_covariance(scen)
    h0, h_int = scen.desired_channel, scen.interference_channels
    eps_batch = bf.epsilon_mvdr(cov, h0, h_int) / 2
    batch_db = 10 * math.log10(th.mse_closed_form(
        bf.rzf_from_epsilon(cov, h0, h_int, eps_batch)[0].weights, scen))

    res = rb.run_online("ddaa", scen, models, 10_000, 300, 10,
                        leakage_budget=eps_batch, step=0.1, alpha=0.5)
    tail_db = 10 * math.log10(res.smoothed[-500:].mean())
    gap = tail_db - batch_db
    constraint_ok = res.max_distortionless_error < 1e-9

    res_zf = rb.run_online("cnlms_zf", scen, models, 10_000, 300, 10, step=0.1)
    nulling_ok = res_zf.max_nulling_residual < 1e-9

    ok = gap < 1.0 and constraint_ok and nulling_ok
    _verdict(10, ok, f"tail gap to batch RZF {gap:+.3f} dB, "
                     f"max constraint dev {res.max_distortionless_error:.1e}, "
                     f"max nulling residual {res_zf.max_nulling_residual:.1e}",
             time.perf_counter() - t0, 300.0)


def test_criterion_11_unbiased_output():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst_z = 0.0
    for scen, models in (rb.build_toy(**TOY, rho=0.6),
                         random_scenario(rng, n_sensors=12, n_interferers=4)):
        cov = cv.analytic_covariance(scen)
        h0, h_int = scen.desired_channel, scen.interference_channels
        eps_m = bf.epsilon_mvdr(cov, h0, h_int)
        weights = np.vstack([
            bf.mvdr(cov, h0).weights,
            bf.zf(cov, scen.channels).weights,
            bf.rzf_from_epsilon(cov, h0, h_int, eps_m / 2)[0].weights,
        ])
        out = ex.empirical_mse(weights, scen, models, 1_000_000,
                               rng_seed=int(rng.integers(2**31)))
        z = np.abs(out.estimate_mean) / out.estimate_std_error
        worst_z = max(worst_z, float(z.max()))
    _verdict(11, worst_z < 4.0, f"max |mean|/SE = {worst_z:.2f}",
             time.perf_counter() - t0, 30.0)
