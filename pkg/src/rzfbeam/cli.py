"""Command-line front end.

Subcommands: ``sweep`` (axis sweeps to CSV), ``eps-search`` (leakage-budget
grid search on one scenario), ``online`` (adaptive-algorithm learning
curves), ``theory`` (single-interference regime report), and ``check``
(fast self-test of the closed forms against independent numerics).

Science parameters come from flags or a flat ``key = value`` config file
(flags win).  Grids use ``a,b,c``, ``lin:start:stop:n``, or
``log:start:stop:n``.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import (__version__, adaptive, beamformers, covariance, experiments,
               scenarios, theory)
from . import _kernels
from ._kernels import fallback as _fallback

_INT_FIELDS = ("n_sensors", "n_interferers", "sample_count", "eval_samples",
               "trials", "seed", "smoothing_window")
_FLOAT_FIELDS = ("spacing_ratio", "snr_db", "sir_db", "rho", "phase", "beta",
                 "eps_rho", "eps_phi", "leakage_budget", "step", "alpha")
_STR_FIELDS = ("scenario", "axis", "covariance_mode", "leadfield_path")
_GRID_FIELDS = ("grid", "epsilon_grid")
_SPEC_FIELDS = _INT_FIELDS + _FLOAT_FIELDS + _STR_FIELDS + _GRID_FIELDS + (
    "beamformers",)


def parse_grid(text: str) -> np.ndarray:
    """Parse ``a,b,c``, ``lin:start:stop:n``, or ``log:start:stop:n``."""
    text = text.strip()
    if text.startswith(("lin:", "log:")):
        parts = text.split(":")
        if len(parts) != 4:
            raise argparse.ArgumentTypeError(
                f"bad grid {text!r}; expected {parts[0]}:start:stop:n")
        try:
            start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}")
        if count < 1:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}: n must be >= 1")
        if parts[0] == "lin":
            return np.linspace(start, stop, count)
        if start <= 0 or stop <= 0:
            raise argparse.ArgumentTypeError(
                f"bad grid {text!r}: log grids need positive endpoints")
        return np.geomspace(start, stop, count)
    try:
        values = [float(token) for token in text.split(",") if token.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}")
    if not values:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: empty")
    return np.asarray(values)


def parse_beamformers(text: str) -> tuple[str, ...]:
    return tuple(token.strip().upper() for token in text.split(",")
                 if token.strip())


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ValueError(f"{path}:{lineno}: expected 'key = value', "
                                 f"got {raw.strip()!r}")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _convert_config_value(key: str, text: str):
    if key in _INT_FIELDS:
        return int(text)
    if key in _FLOAT_FIELDS:
        return float(text)
    if key in _GRID_FIELDS:
        return parse_grid(text)
    if key == "beamformers":
        return parse_beamformers(text)
    if key in _STR_FIELDS:
        return text
    raise ValueError(f"unknown config key {key!r}")


def _add_spec_arguments(parser: argparse.ArgumentParser, *, with_axis: bool):
    parser.add_argument("--config", metavar="FILE",
                        help="flat key = value config; flags override it")
    parser.add_argument("--scenario", choices=("toy", "leadfield"))
    parser.add_argument("--n-sensors", type=int, dest="n_sensors")
    parser.add_argument("--n-interferers", type=int, dest="n_interferers")
    parser.add_argument("--spacing-ratio", type=float, dest="spacing_ratio")
    parser.add_argument("--leadfield", dest="leadfield_path", metavar="FILE")
    if with_axis:
        parser.add_argument("--axis", choices=experiments.AXES)
        parser.add_argument("--grid", type=parse_grid)
    parser.add_argument("--snr-db", type=float, dest="snr_db")
    parser.add_argument("--sir-db", type=float, dest="sir_db")
    parser.add_argument("--rho", type=float)
    parser.add_argument("--phase", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--eps-rho", type=float, dest="eps_rho")
    parser.add_argument("--eps-phi", type=float, dest="eps_phi")
    parser.add_argument("--sample-count", type=int, dest="sample_count")
    parser.add_argument("--eval-samples", type=int, dest="eval_samples")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--beamformers", type=parse_beamformers)
    parser.add_argument("--covariance-mode", dest="covariance_mode",
                        choices=("analytic", "sample"))
    parser.add_argument("--epsilon-grid", type=parse_grid, dest="epsilon_grid")
    parser.add_argument("--leakage-budget", type=float, dest="leakage_budget")
    parser.add_argument("--step", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--smoothing-window", type=int, dest="smoothing_window")


def _merged_spec_values(args) -> dict:
    merged: dict = {}
    if getattr(args, "config", None):
        for key, text in read_config(args.config).items():
            merged[key] = _convert_config_value(key, text)
    for key in _SPEC_FIELDS + ("axis",):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    grid = getattr(args, "grid", None)
    if grid is not None:
        merged["grid"] = grid
    return merged


def _spec_from_values(values: dict) -> experiments.ExperimentSpec:
    if "axis" not in values:
        raise ValueError("an axis is required (--axis or config key 'axis')")
    if "grid" not in values:
        raise ValueError("a grid is required (--grid or config key 'grid')")
    return experiments.ExperimentSpec(**values)


def _scenario_from_values(values: dict):
    """Build the fixed-parameter scenario for eps-search/online."""
    values = dict(values)
    values.setdefault("axis", "epsilon")
    values.setdefault("grid", np.array([0.0]))
    spec = experiments.ExperimentSpec(**values)
    channels = None
    if spec.scenario == "leadfield":
        channels = scenarios.load_leadfield(spec.leadfield_path).channels
    built = experiments._build_scenario(spec, channels, spec.snr_db,
                                        spec.sir_db, spec.rho)
    return spec, built[0], built[1]


def _print_errors(result, stream=sys.stderr):
    for message in result.errors:
        print(f"warning: {message}", file=stream)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sweep(args) -> int:
    spec = _spec_from_values(_merged_spec_values(args))
    result = experiments.run_sweep(spec)
    experiments.emit_csv(result, args.out)
    _print_errors(result)
    print(f"wrote {len(result.rows)} rows to {args.out} "
          f"({len(result.errors)} errors, {result.wall_time:.2f}s, "
          f"backend={result.backend})")
    print(f"manifest: {args.out}.manifest.json")
    return 0


def _cmd_eps_search(args) -> int:
    values = _merged_spec_values(args)
    _, scenario, _ = _scenario_from_values(values)
    best, table = experiments.epsilon_grid_search(scenario, values.get("epsilon_grid"))
    sigma0_sq = scenario.desired_power
    print(f"{'epsilon':>14} {'lambda':>12} {'mse_db':>10}  clamped")
    for entry in table:
        mse_db = 10.0 * math.log10(entry.mse / sigma0_sq)
        print(f"{entry.epsilon:14.6g} {entry.lambda_:12.6g} {mse_db:10.4f}  "
              f"{'yes' if entry.clamped else 'no'}")
    best_mse = min(entry.mse for entry in table)
    print(f"best epsilon: {best:.6g} "
          f"(mse {10.0 * math.log10(best_mse / sigma0_sq):.4f} dB)")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write("epsilon,lambda,mse_db,clamped\n")
            for entry in table:
                mse_db = 10.0 * math.log10(entry.mse / sigma0_sq)
                handle.write(f"{entry.epsilon:.12g},{entry.lambda_:.12g},"
                             f"{mse_db:.12g},{int(entry.clamped)}\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_online(args) -> int:
    values = _merged_spec_values(args)
    values["axis"] = "iteration"
    if "beamformers" not in values:
        values["beamformers"] = ("RZF", "DDAA", "CNLMS_MVDR", "CNLMS_ZF")
    if "grid" not in values:
        total = args.iterations
        points = np.unique(np.rint(np.geomspace(1, total, 40)).astype(int))
        values["grid"] = points.astype(float)
    spec = _spec_from_values(values)
    result = experiments.run_sweep(spec)
    experiments.emit_csv(result, args.out)
    _print_errors(result)
    tail = {}
    for row in result.rows:
        if row.error is None:
            tail[row.beamformer] = row.mse_db
    summary = "  ".join(f"{label}={mse_db:.2f}dB" for label, mse_db in tail.items())
    print(f"final smoothed MSE: {summary}")
    print(f"wrote {len(result.rows)} rows to {args.out} "
          f"(backend={result.backend})")
    return 0


def _cmd_theory(args) -> int:
    if args.c1 is not None:
        geometry = theory.SingleInterferenceGeometry.from_real(
            args.tau, args.c1, args.sigma1_sq, args.sigma_n_sq, args.sigma0_sq)
    else:
        geometry = theory.SingleInterferenceGeometry(
            tau=args.tau, phi_z=args.phi_z, c1_abs=args.c1_abs,
            phi_c=args.phi_c, sigma1_sq=args.sigma1_sq,
            sigma_n_sq=args.sigma_n_sq, sigma0_sq=args.sigma0_sq)
    report = theory.regime(geometry)
    achieved = theory.achieved_mse(geometry)
    print(f"geometry: tau={geometry.tau:.6g} phi_z={geometry.phi_z:.6g} "
          f"|c1|={geometry.c1_abs:.6g} phi_c={geometry.phi_c:.6g} "
          f"sigma1^2={geometry.sigma1_sq:.6g} sigma_n^2={geometry.sigma_n_sq:.6g} "
          f"sigma0^2={geometry.sigma0_sq:.6g}")
    gamma_text = "n/a" if report.gamma is None else f"{report.gamma:.6f}"
    print(f"delta1={report.delta1:.6g}  delta2={report.delta2:.6g}  "
          f"gamma={gamma_text}")
    print(f"regime={report.regime}  lambda_opt={report.lambda_opt:g}")
    print(f"single-interference superiority (strictly beats MVDR and ZF): "
          f"{'yes' if theory.superiority_witness(geometry) else 'no'}")
    print("achieved MSE (dB rel. desired power):")
    for label in ("mvdr", "zf", "rzf", "mmse_dr"):
        value = getattr(achieved, label)
        print(f"  {label.upper():8s} {10.0 * math.log10(value / geometry.sigma0_sq):10.4f}"
              f"   ({value:.9g})")
    return 0


# ---------------------------------------------------------------------------
# self checks


def _check_reference_gammas():
    expected = {0.99: -2.061856, -0.2: 0.769231, 0.1: 1.176471}
    worst = 0.0
    for c1, target in expected.items():
        geometry = theory.SingleInterferenceGeometry.from_real(
            math.pi / 6, c1, 1.0, 1.0)
        gamma = theory.regime(geometry).gamma
        worst = max(worst, abs(gamma - target))
    return worst < 5e-5, f"max |gamma error| = {worst:.2e}"


def _check_curve_identity():
    rng = np.random.default_rng(11)
    lams = np.geomspace(1e-4, 1e4, 20)
    worst = 0.0
    for _ in range(5):
        geometry = theory.SingleInterferenceGeometry(
            tau=rng.uniform(0.05, 1.4), phi_z=rng.uniform(0, 2 * math.pi),
            c1_abs=rng.uniform(0, 0.9), phi_c=rng.uniform(0, 2 * math.pi),
            sigma1_sq=rng.uniform(0.2, 3.0), sigma_n_sq=rng.uniform(0.05, 2.0))
        scenario = theory.two_channel_scenario(geometry)
        cov = covariance.analytic_covariance(scenario)
        for lam in lams:
            built = beamformers.rzf_from_lambda(
                cov, scenario.desired_channel,
                scenario.interference_channels, lam)
            direct = float(theory.mse_closed_form(built.weights, scenario))
            curve = float(theory.mse_of_lambda(geometry, lam))
            worst = max(worst, abs(direct - curve) / direct)
    return worst < 1e-9, f"max relative gap = {worst:.2e}"


def _check_duality_endpoints():
    scenario, _ = scenarios.build_toy(8, 3, rho=0.5)
    cov = covariance.analytic_covariance(scenario)
    h0 = scenario.desired_channel
    h_int = scenario.interference_channels
    w_mvdr = beamformers.mvdr(cov, h0).weights
    w_zf = beamformers.zf(cov, scenario.channels).weights
    eps_max = beamformers.epsilon_mvdr(cov, h0, h_int)
    at_max, _ = beamformers.rzf_from_epsilon(cov, h0, h_int, eps_max)
    at_zero, _ = beamformers.rzf_from_epsilon(cov, h0, h_int, 0.0)
    mid, _ = beamformers.rzf_from_epsilon(cov, h0, h_int, eps_max / 3)
    gap = max(np.abs(at_max.weights - w_mvdr).max(),
              np.abs(at_zero.weights - w_zf).max())
    leak_err = abs(beamformers.leakage(mid.weights, h_int) - eps_max / 3)
    ok = gap < 1e-10 and leak_err < 1e-8 * max(eps_max / 3, 1.0)
    return ok, f"endpoint gap {gap:.2e}, leakage error {leak_err:.2e}"


def _check_leakage_split():
    scenario, _ = scenarios.build_toy(8, 3, rho=0.5)
    rng = np.random.default_rng(5)
    h0 = scenario.desired_channel
    worst = 0.0
    for _ in range(10):
        w = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        w = w / np.vdot(h0, w)  # distortionless
        noise, interference = experiments.leakage_decomposition(w, scenario)
        mse = float(theory.mse_closed_form(w, scenario))
        worst = max(worst, abs(noise + interference - mse) / mse)
    return worst < 1e-12, f"max relative split error = {worst:.2e}"


def _check_kernel_parity():
    scenario, models = scenarios.build_toy(8, 3, rho=0.5)
    block = scenarios.generate_block(scenario, models, 400, 99)
    snapshots = np.ascontiguousarray(block.snapshots.T)
    desired = np.ascontiguousarray(block.sources[0])
    h0 = np.array(scenario.desired_channel)
    gram = covariance.interference_gram(scenario)
    h_tilde = np.array(gram.normalized_channels)
    w0 = h0 / np.vdot(h0, h0).real
    err_c, w_c, dev_c = _kernels.ddaa_run(w0.copy(), snapshots, desired,
                                          h0, h_tilde, 0.05, 0.1, 0.5)
    err_f, w_f, dev_f = _fallback.ddaa_run(w0.copy(), snapshots, desired,
                                           h0, h_tilde, 0.05, 0.1, 0.5)
    gap = max(float(np.abs(err_c - err_f).max()), float(np.abs(w_c - w_f).max()))
    note = "" if _kernels.backend() == "compiled" else " (fallback only)"
    return gap < 1e-9, f"max DDAA backend gap = {gap:.2e}{note}"


def _check_unbiasedness():
    scenario, models = scenarios.build_toy(8, 3, rho=0.5)
    cov = covariance.analytic_covariance(scenario)
    h0 = scenario.desired_channel
    h_int = scenario.interference_channels
    eps_max = beamformers.epsilon_mvdr(cov, h0, h_int)
    stacked = np.array([
        beamformers.mvdr(cov, h0).weights,
        beamformers.zf(cov, scenario.channels).weights,
        beamformers.rzf_from_epsilon(cov, h0, h_int, eps_max / 4)[0].weights,
    ])
    evaluation = experiments.empirical_mse(stacked, scenario, models,
                                           200_000, 2024)
    ratio = float(np.max(np.abs(evaluation.estimate_mean)
                         / evaluation.estimate_std_error))
    return ratio <= 4.0, f"max |mean|/SE = {ratio:.2f}"


_CHECKS = (
    ("reference gamma anchors", _check_reference_gammas),
    ("lambda-curve vs constructed weights", _check_curve_identity),
    ("epsilon duality endpoints", _check_duality_endpoints),
    ("noise/interference MSE split", _check_leakage_split),
    ("compiled vs fallback kernels", _check_kernel_parity),
    ("zero-mean output (unbiasedness)", _check_unbiasedness),
)


def _cmd_check(_args) -> int:
    failures = 0
    for name, func in _CHECKS:
        try:
            ok, detail = func()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status}  {name}: {detail}")
    print(f"{len(_CHECKS) - failures}/{len(_CHECKS)} checks passed "
          f"(backend={_kernels.backend()})")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rzfbeam",
        description="Relaxed zero-forcing beamforming experiments.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run an axis sweep and emit CSV")
    _add_spec_arguments(p_sweep, with_axis=True)
    p_sweep.add_argument("--out", default="sweep.csv", metavar="FILE")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_eps = sub.add_parser("eps-search",
                           help="grid-search the leakage budget on one scenario")
    _add_spec_arguments(p_eps, with_axis=False)
    p_eps.add_argument("--out", metavar="FILE")
    p_eps.set_defaults(func=_cmd_eps_search)

    p_online = sub.add_parser("online",
                              help="learning curves for the online algorithms")
    _add_spec_arguments(p_online, with_axis=False)
    p_online.add_argument("--iterations", type=int, default=10_000)
    p_online.add_argument("--out", default="online.csv", metavar="FILE")
    p_online.set_defaults(func=_cmd_online)

    p_theory = sub.add_parser("theory",
                              help="single-interference regime report")
    p_theory.add_argument("--tau", type=float, required=True)
    p_theory.add_argument("--c1", type=float,
                          help="real-valued correlation (signs folded into phases)")
    p_theory.add_argument("--c1-abs", type=float, dest="c1_abs", default=0.0)
    p_theory.add_argument("--phi-c", type=float, dest="phi_c", default=0.0)
    p_theory.add_argument("--phi-z", type=float, dest="phi_z", default=0.0)
    p_theory.add_argument("--sigma1-sq", type=float, dest="sigma1_sq", default=1.0)
    p_theory.add_argument("--sigma-n-sq", type=float, dest="sigma_n_sq", default=1.0)
    p_theory.add_argument("--sigma0-sq", type=float, dest="sigma0_sq", default=1.0)
    p_theory.set_defaults(func=_cmd_theory)

    p_check = sub.add_parser("check", help="run the fast oracle self-checks")
    p_check.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
