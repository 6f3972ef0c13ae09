"""Declarative MSE sweeps, epsilon tuning, and CSV emission.

A sweep fixes a calibrated scenario family, varies one axis (SNR, SIR,
temporal correlation, the leakage budget, the penalty weight, or the
iteration index for online algorithms), and reports each requested
beamformer's MSE in dB together with a noise/interference split of the
output error power.  Results are deterministic under the configured seed
and can be round-tripped through CSV.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, adaptive, beamformers, covariance, scenarios, theory
from ._kernels import backend

BATCH_BEAMFORMERS = ("MVDR", "ZF", "RZF", "MMSE_DR", "A_MMSE")
ONLINE_BEAMFORMERS = ("DDAA", "CNLMS_MVDR", "CNLMS_ZF")
KNOWN_BEAMFORMERS = BATCH_BEAMFORMERS + ONLINE_BEAMFORMERS
AXES = ("snr_db", "sir_db", "rho", "epsilon", "lambda", "iteration")

CSV_HEADER = ("axis", "beamformer", "mse_db", "epsilon", "lambda",
              "leak_noise", "leak_interf")

# Evaluation streams must never alias the estimation streams, which use
# plain ``seed ^ trial`` integers.
_EVAL_SEED_OFFSET = 2 ** 32


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: a scenario family, one axis, and fixed parameters.

    ``scenario`` is ``"toy"`` (uniform linear array on the evenly spaced
    DOA grid) or ``"leadfield"`` (channels read from ``leadfield_path``;
    the first column is the desired channel).  ``axis`` is one of
    ``snr_db | sir_db | rho | epsilon | lambda | iteration`` and ``grid``
    holds its values.  Batch beamformers may appear on any axis (on the
    ``iteration`` axis they become constant reference lines); the online
    algorithms are only meaningful on the ``iteration`` axis.

    ``covariance_mode="analytic"`` reports closed-form MSE of weights
    built from the exact covariance.  ``"sample"`` estimates the
    covariance from ``sample_count`` snapshots per trial (trial ``t``
    seeds its block with ``seed ^ t``) and reports the Monte Carlo MSE of
    the estimated weights on fresh evaluation blocks of ``eval_samples``
    snapshots, averaged over ``trials``.  The distortionless-MMSE bound
    is always built from the true statistics (no estimator for it is
    defined), and when RZF's budget is tuned rather than swept the grid
    search runs on the analytic curve so that one budget serves all
    trials of a setting.
    """

    axis: str
    grid: np.ndarray
    scenario: str = "toy"
    n_sensors: int = 16
    n_interferers: int = 7
    spacing_ratio: float = 0.5
    leadfield_path: str | None = None
    snr_db: float = 0.0
    sir_db: float = 0.0
    rho: float = 0.6
    phase: float = 0.0
    beta: float = 0.8
    eps_rho: float = 0.1
    eps_phi: float = math.pi / 12
    sample_count: int = 8000
    eval_samples: int = 200_000
    trials: int = 1
    seed: int = 0
    beamformers: tuple[str, ...] = ("MVDR", "ZF", "RZF", "MMSE_DR")
    covariance_mode: str = "analytic"
    epsilon_grid: np.ndarray | None = None
    leakage_budget: float | None = None
    step: float = 0.1
    alpha: float = 0.5
    smoothing_window: int = 30

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}; expected one of {AXES}")
        grid = np.atleast_1d(np.asarray(self.grid, dtype=float))
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a nonempty 1-D vector")
        steps = np.diff(grid)
        if grid.size > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("grid must be strictly monotone")
        object.__setattr__(self, "grid", grid)

        if self.scenario not in ("toy", "leadfield"):
            raise ValueError(f"unknown scenario source {self.scenario!r}")
        if self.scenario == "leadfield" and not self.leadfield_path:
            raise ValueError("leadfield scenario needs leadfield_path")

        labels = tuple(str(b).upper() for b in self.beamformers)
        if not labels:
            raise ValueError("at least one beamformer must be requested")
        unknown = [b for b in labels if b not in KNOWN_BEAMFORMERS]
        if unknown:
            raise ValueError(f"unknown beamformers {unknown}; "
                             f"expected a subset of {KNOWN_BEAMFORMERS}")
        online = [b for b in labels if b in ONLINE_BEAMFORMERS]
        if online and self.axis != "iteration":
            raise ValueError(f"online algorithms {online} require axis='iteration'")
        object.__setattr__(self, "beamformers", labels)

        if self.covariance_mode not in ("analytic", "sample"):
            raise ValueError(f"unknown covariance_mode {self.covariance_mode!r}")

        if self.axis == "rho":
            if np.any(self.grid <= 0.0) or np.any(self.grid > 1.0):
                raise ValueError("rho grid values must lie in (0, 1]")
        elif not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        if self.axis == "epsilon" and np.any(self.grid < 0.0):
            raise ValueError("epsilon grid values must be nonnegative")
        if self.axis == "lambda" and np.any(self.grid < 0.0):
            raise ValueError("lambda grid values must be nonnegative")
        if self.axis == "iteration":
            if np.any(self.grid < 1.0) or np.any(self.grid != np.round(self.grid)):
                raise ValueError("iteration grid values must be positive integers")
            if self.grid.size > 1 and self.grid[1] < self.grid[0]:
                raise ValueError("iteration grid must be increasing")

        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        # The estimate-error band only constrains settings that actually
        # build the estimated-statistics beamformer; on a rho axis it is
        # re-checked per point so other beamformers still run.
        if "A_MMSE" in labels and self.axis != "rho":
            _check_eps_rho(self.eps_rho, self.rho)

        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if self.eval_samples < 1:
            raise ValueError("eval_samples must be at least 1")
        if not 0.0 < self.step < 2.0:
            raise ValueError("step must lie in (0, 2)")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.epsilon_grid is not None:
            eg = np.atleast_1d(np.asarray(self.epsilon_grid, dtype=float))
            if eg.size == 0 or np.any(eg < 0.0):
                raise ValueError("epsilon_grid must be nonempty and nonnegative")
            object.__setattr__(self, "epsilon_grid", eg)

    def as_dict(self) -> dict:
        """JSON-friendly view of every field (arrays become lists)."""
        out = {}
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if isinstance(value, np.ndarray):
                value = value.tolist()
            elif isinstance(value, tuple):
                value = list(value)
            out[field.name] = value
        return out


def _check_eps_rho(eps_rho: float, rho: float) -> None:
    if not -rho < eps_rho < 1.0 - rho:
        raise ValueError(
            f"eps_rho={eps_rho:g} outside (-rho, 1-rho) = ({-rho:g}, {1 - rho:g})")


@dataclasses.dataclass(frozen=True)
class SweepRow:
    """One (axis point, beamformer) result; ``error`` marks failed rows."""

    axis_value: float
    beamformer: str
    mse_db: float
    epsilon: float | None = None
    lambda_: float | None = None
    leak_noise: float | None = None
    leak_interf: float | None = None
    error: str | None = None


@dataclasses.dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    seed: int
    config_hash: str
    version: str
    wall_time: float
    backend: str
    errors: tuple[str, ...]


def config_hash(spec: ExperimentSpec) -> str:
    payload = json.dumps(spec.as_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# output-power split and empirical evaluation


def leakage_decomposition(weights, scenario) -> tuple[float, float]:
    """Split output error power into noise and interference parts.

    Returns ``(noise_power_out, interference_power_out)`` =
    (sigma_n^2 ||w||^2, a^H C_I a) with ``a = H_I^H w``.  For a
    distortionless ``w`` the two add up to the closed-form MSE.
    """
    w = np.asarray(weights, dtype=complex)
    noise = float(scenario.noise_power * np.real(np.vdot(w, w)))
    a = scenario.interference_channels.conj().T @ w
    c_int = scenario.source_cov[1:, 1:]
    interference = float(np.real(np.vdot(a, c_int @ a)))
    return noise, interference


@dataclasses.dataclass(frozen=True)
class EmpiricalEvaluation:
    """Streaming Monte Carlo statistics for one or more weight vectors."""

    n_samples: int
    mse: np.ndarray
    mse_std_error: np.ndarray
    estimate_mean: np.ndarray
    estimate_std_error: np.ndarray


def empirical_mse(weights, scenario, source_models, n_samples: int,
                  rng_seed: int, chunk_size: int = 200_000) -> EmpiricalEvaluation:
    """Estimate E|w^H y - s_0|^2 for each row of ``weights`` by simulation.

    Accumulates second and fourth error moments (for standard errors of
    the MSE) plus the mean output (for unbiasedness checks) in chunks, so
    arbitrarily long evaluations use bounded memory.  Chunk ``i`` draws
    its block with entropy ``[rng_seed, i]``.
    """
    w_rows = np.atleast_2d(np.asarray(weights, dtype=complex))
    n_vectors = w_rows.shape[0]
    sum_e2 = np.zeros(n_vectors)
    sum_e4 = np.zeros(n_vectors)
    sum_out = np.zeros(n_vectors, dtype=complex)
    sum_out2 = np.zeros(n_vectors)

    done = 0
    chunk_index = 0
    while done < n_samples:
        length = min(chunk_size, n_samples - done)
        block = scenarios.generate_block(scenario, source_models, length,
                                         [rng_seed, chunk_index])
        outputs = w_rows.conj() @ block.snapshots
        err2 = np.abs(outputs - block.sources[0]) ** 2
        sum_e2 += err2.sum(axis=1)
        sum_e4 += (err2 * err2).sum(axis=1)
        sum_out += outputs.sum(axis=1)
        sum_out2 += (np.abs(outputs) ** 2).sum(axis=1)
        done += length
        chunk_index += 1

    mse = sum_e2 / n_samples
    var_e2 = np.maximum(sum_e4 / n_samples - mse ** 2, 0.0)
    mean_out = sum_out / n_samples
    var_out = np.maximum(sum_out2 / n_samples - np.abs(mean_out) ** 2, 0.0)
    return EmpiricalEvaluation(
        n_samples=n_samples,
        mse=mse,
        mse_std_error=np.sqrt(var_e2 / n_samples),
        estimate_mean=mean_out,
        estimate_std_error=np.sqrt(var_out / n_samples),
    )


# ---------------------------------------------------------------------------
# epsilon tuning


@dataclasses.dataclass(frozen=True)
class EpsilonSearchEntry:
    epsilon: float
    epsilon_used: float
    lambda_: float
    mse: float
    clamped: bool


def default_epsilon_grid(epsilon_mvdr: float, n_points: int = 61) -> np.ndarray:
    """{0} followed by log-spaced fractions of the inactive-constraint budget."""
    return np.concatenate([[0.0],
                           np.geomspace(1e-6, 1.0, n_points) * epsilon_mvdr])


def epsilon_grid_search(scenario, grid=None, *, cov=None):
    """Pick the leakage budget minimizing the closed-form MSE on a grid.

    Returns ``(best_epsilon, table)``.  Budgets above the inactive
    threshold are evaluated at the unconstrained solution and flagged
    ``clamped``.  Ties break toward the larger budget (the weaker
    constraint).  ``cov`` defaults to the scenario's analytic covariance.
    """
    if cov is None:
        cov = covariance.analytic_covariance(scenario)
    h0 = scenario.desired_channel
    h_int = scenario.interference_channels
    eps_max = beamformers.epsilon_mvdr(cov, h0, h_int)
    if grid is None:
        grid = default_epsilon_grid(eps_max)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0 or np.any(grid < 0.0):
        raise ValueError("epsilon grid must be nonempty and nonnegative")

    entries = []
    best_eps = None
    best_mse = math.inf
    for eps in grid:
        solution, report = beamformers.rzf_from_epsilon(cov, h0, h_int, eps)
        mse = float(theory.mse_closed_form(solution.weights, scenario))
        clamped = bool(eps >= eps_max)
        entries.append(EpsilonSearchEntry(
            epsilon=float(eps),
            epsilon_used=float(min(eps, eps_max)),
            lambda_=report.lambda_,
            mse=mse,
            clamped=clamped,
        ))
        if mse < best_mse or (mse == best_mse and best_eps is not None
                              and eps > best_eps):
            best_mse = mse
            best_eps = float(eps)
    return best_eps, tuple(entries)


# ---------------------------------------------------------------------------
# sweep execution


def _build_scenario(spec: ExperimentSpec, channels, snr_db, sir_db, rho):
    if spec.scenario == "toy":
        return scenarios.build_toy(
            spec.n_sensors, spec.n_interferers, rho=rho, snr_db=snr_db,
            sir_db=sir_db, phases=spec.phase, spacing_ratio=spec.spacing_ratio)
    return scenarios.build_from_channels(
        channels, rho=rho, snr_db=snr_db, sir_db=sir_db, phases=spec.phase)


def _point_parameters(spec: ExperimentSpec, axis_value: float):
    snr_db, sir_db, rho = spec.snr_db, spec.sir_db, spec.rho
    if spec.axis == "snr_db":
        snr_db = axis_value
    elif spec.axis == "sir_db":
        sir_db = axis_value
    elif spec.axis == "rho":
        rho = axis_value
    return snr_db, sir_db, rho


def _correlation_estimates(spec: ExperimentSpec, scenario):
    """Erroneous temporal statistics for the estimated-MMSE beamformer."""
    c_true = scenario.temporal_correlations
    sigma0 = math.sqrt(scenario.desired_power)
    sigma_j = np.sqrt(np.real(np.diag(scenario.source_cov[1:, 1:])))
    magnitude = np.abs(c_true) + spec.eps_rho * sigma0 * sigma_j
    phase = np.angle(c_true) + spec.eps_phi
    return magnitude * np.exp(1j * phase)


def _batch_weights(label: str, spec: ExperimentSpec, scenario, cov,
                   axis_value: float, rho: float, tuned_epsilon):
    """Weights plus (epsilon, lambda) auxiliaries for one batch label."""
    h0 = scenario.desired_channel
    h_int = scenario.interference_channels
    if label == "MVDR":
        built = beamformers.mvdr(cov, h0)
        return built.weights, None, 0.0
    if label == "ZF":
        built = beamformers.zf(cov, scenario.channels)
        return built.weights, 0.0, math.inf
    if label == "MMSE_DR":
        built = beamformers.mmse_dr(scenario)
        return built.weights, None, None
    if label == "A_MMSE":
        _check_eps_rho(spec.eps_rho, rho)
        built = beamformers.a_mmse(
            cov, h0, h_int, spec.beta * scenario.desired_power,
            _correlation_estimates(spec, scenario))
        return built.weights, None, None
    # RZF: the budget is the axis value, the penalty is the axis value,
    # or the setting-level tuned budget.
    if spec.axis == "epsilon":
        built, report = beamformers.rzf_from_epsilon(cov, h0, h_int, axis_value)
        return built.weights, float(axis_value), report.lambda_
    if spec.axis == "lambda":
        built = beamformers.rzf_from_lambda(cov, h0, h_int, axis_value)
        achieved = beamformers.leakage(built.weights, h_int)
        return built.weights, float(achieved), float(axis_value)
    built, report = beamformers.rzf_from_epsilon(cov, h0, h_int, tuned_epsilon)
    return built.weights, float(tuned_epsilon), report.lambda_


def _error_rows(axis_value, labels, message):
    return [SweepRow(axis_value=float(axis_value), beamformer=label,
                     mse_db=math.nan, error=message) for label in labels]


def _mse_db(mse: float, scenario) -> float:
    return 10.0 * math.log10(mse / scenario.desired_power)


def _analytic_point_rows(spec, axis_value, scenario, labels, tuned_epsilon):
    cov = covariance.analytic_covariance(scenario)
    rho = _point_parameters(spec, axis_value)[2]
    rows = []
    for label in labels:
        try:
            weights, eps_used, lam_used = _batch_weights(
                label, spec, scenario, cov, axis_value, rho, tuned_epsilon)
        except (np.linalg.LinAlgError, ValueError, RuntimeError) as exc:
            rows.extend(_error_rows(axis_value, [label], str(exc)))
            continue
        mse = float(theory.mse_closed_form(weights, scenario))
        noise, interference = leakage_decomposition(weights, scenario)
        rows.append(SweepRow(
            axis_value=float(axis_value), beamformer=label,
            mse_db=_mse_db(mse, scenario), epsilon=eps_used, lambda_=lam_used,
            leak_noise=noise, leak_interf=interference))
    return rows


def _sample_point_rows(spec, axis_value, scenario, models, labels, tuned_epsilon):
    rho = _point_parameters(spec, axis_value)[2]
    per_label_weights = {label: [] for label in labels}
    per_label_aux = {}
    failed = {}

    for trial in range(spec.trials):
        block = scenarios.generate_block(scenario, models, spec.sample_count,
                                         spec.seed ^ trial)
        cov = covariance.sample_covariance(block.snapshots)
        for label in labels:
            if label in failed:
                continue
            try:
                weights, eps_used, lam_used = _batch_weights(
                    label, spec, scenario, cov, axis_value, rho, tuned_epsilon)
            except (np.linalg.LinAlgError, ValueError, RuntimeError) as exc:
                failed[label] = str(exc)
                continue
            per_label_weights[label].append(weights)
            per_label_aux[label] = (eps_used, lam_used)

    live = [label for label in labels if label not in failed]
    sums = {label: 0.0 for label in live}
    leaks = {label: np.zeros(2) for label in live}
    for trial in range(spec.trials):
        stacked = np.array([per_label_weights[label][trial] for label in live])
        evaluation = empirical_mse(stacked, scenario, models, spec.eval_samples,
                                   (spec.seed ^ trial) + _EVAL_SEED_OFFSET)
        for k, label in enumerate(live):
            sums[label] += evaluation.mse[k]
            leaks[label] += leakage_decomposition(stacked[k], scenario)

    rows = []
    for label in labels:
        if label in failed:
            rows.extend(_error_rows(axis_value, [label], failed[label]))
            continue
        mse = sums[label] / spec.trials
        noise, interference = leaks[label] / spec.trials
        eps_used, lam_used = per_label_aux[label]
        rows.append(SweepRow(
            axis_value=float(axis_value), beamformer=label,
            mse_db=_mse_db(mse, scenario), epsilon=eps_used, lambda_=lam_used,
            leak_noise=float(noise), leak_interf=float(interference)))
    return rows


def _point_rows(spec: ExperimentSpec, axis_value: float, channels, labels):
    snr_db, sir_db, rho = _point_parameters(spec, axis_value)
    try:
        scenario, models = _build_scenario(spec, channels, snr_db, sir_db, rho)
    except (ValueError, np.linalg.LinAlgError) as exc:
        return _error_rows(axis_value, labels, f"calibration failed: {exc}")

    tuned_epsilon = None
    if "RZF" in labels and spec.axis not in ("epsilon", "lambda"):
        if spec.leakage_budget is not None:
            tuned_epsilon = spec.leakage_budget
        else:
            tuned_epsilon, _ = epsilon_grid_search(scenario, spec.epsilon_grid)

    if spec.covariance_mode == "analytic":
        return _analytic_point_rows(spec, axis_value, scenario, labels,
                                    tuned_epsilon)
    return _sample_point_rows(spec, axis_value, scenario, models, labels,
                              tuned_epsilon)


def _iteration_axis_rows(spec: ExperimentSpec, channels):
    batch = [b for b in spec.beamformers if b in BATCH_BEAMFORMERS]
    online = [b for b in spec.beamformers if b in ONLINE_BEAMFORMERS]
    scenario, models = _build_scenario(spec, channels, spec.snr_db,
                                       spec.sir_db, spec.rho)
    checkpoints = spec.grid.astype(int)
    n_iterations = int(checkpoints[-1])

    budget = spec.leakage_budget
    if budget is None and ("DDAA" in online or "RZF" in batch):
        budget, _ = epsilon_grid_search(scenario, spec.epsilon_grid)

    rows = []
    # Constant reference lines from the analytic covariance.
    for label in batch:
        sub_rows = _analytic_point_rows(spec, float(checkpoints[0]), scenario,
                                        [label], budget)
        template = sub_rows[0]
        for k in checkpoints:
            rows.append(dataclasses.replace(template, axis_value=float(k)))

    for label in online:
        result = adaptive.run_online(
            label.lower(), scenario, models, n_iterations, spec.trials,
            spec.seed, leakage_budget=budget, step=spec.step,
            alpha=spec.alpha, smoothing_window=spec.smoothing_window)
        splits = np.array([leakage_decomposition(w, scenario)
                           for w in result.final_weights])
        noise, interference = splits.mean(axis=0)
        eps_used = budget if label == "DDAA" else None
        for k in checkpoints:
            mse = float(result.smoothed[k - 1])
            rows.append(SweepRow(
                axis_value=float(k), beamformer=label,
                mse_db=_mse_db(mse, scenario), epsilon=eps_used, lambda_=None,
                leak_noise=float(noise), leak_interf=float(interference)))
    return rows


def run_sweep(spec: ExperimentSpec) -> SweepResult:
    """Execute a sweep; every failure becomes an explicit error row."""
    start = time.perf_counter()
    channels = None
    if spec.scenario == "leadfield":
        channels = scenarios.load_leadfield(spec.leadfield_path).channels

    if spec.axis == "iteration":
        rows = _iteration_axis_rows(spec, channels)
    else:
        labels = list(spec.beamformers)
        n_threads = int(os.environ.get("RZFBEAM_THREADS", "1") or "1")
        if n_threads > 1 and spec.grid.size > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                chunks = list(pool.map(
                    lambda value: _point_rows(spec, value, channels, labels),
                    spec.grid))
        else:
            chunks = [_point_rows(spec, value, channels, labels)
                      for value in spec.grid]
        rows = [row for chunk in chunks for row in chunk]

    errors = tuple(
        f"axis={row.axis_value:g} beamformer={row.beamformer}: {row.error}"
        for row in rows if row.error is not None)
    return SweepResult(
        rows=tuple(rows),
        seed=spec.seed,
        config_hash=config_hash(spec),
        version=__version__,
        wall_time=time.perf_counter() - start,
        backend=backend(),
        errors=errors,
    )


# ---------------------------------------------------------------------------
# CSV round trip


def _format_field(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".12g")


def _parse_field(text: str):
    return None if text == "" else float(text)


def emit_csv(result: SweepResult, path: str) -> None:
    """Write rows to ``path`` and the run manifest to ``path``.manifest.json.

    Bodies are byte-identical across reruns of the same spec and seed;
    volatile facts (wall time) live only in the manifest.
    """
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in result.rows:
            writer.writerow([
                _format_field(row.axis_value),
                row.beamformer,
                _format_field(row.mse_db),
                _format_field(row.epsilon),
                _format_field(row.lambda_),
                _format_field(row.leak_noise),
                _format_field(row.leak_interf),
            ])
    manifest = {
        "seed": result.seed,
        "config_hash": result.config_hash,
        "version": result.version,
        "wall_time_s": result.wall_time,
        "backend": result.backend,
        "rows": len(result.rows),
        "errors": list(result.errors),
    }
    with open(path + ".manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_sweep_csv(path: str) -> tuple[SweepRow, ...]:
    """Parse a CSV written by :func:`emit_csv` back into rows."""
    rows = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        for record in reader:
            if len(record) != len(CSV_HEADER):
                raise ValueError(f"{path}: malformed row {record}")
            mse_db = _parse_field(record[2])
            rows.append(SweepRow(
                axis_value=float(record[0]),
                beamformer=record[1],
                mse_db=math.nan if mse_db is None else mse_db,
                epsilon=_parse_field(record[3]),
                lambda_=_parse_field(record[4]),
                leak_noise=_parse_field(record[5]),
                leak_interf=_parse_field(record[6]),
            ))
    return tuple(rows)
