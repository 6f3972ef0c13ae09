"""Online (per-snapshot) beamformer adaptation.

Two algorithm families are provided:

* a dual-domain adaptive algorithm (DDAA) that tracks the leakage-budget
  beamformer: each snapshot contributes an output-suppressing displacement
  and a leakage-shrinking displacement, both confined to the plane
  ``w^H h_0 = 1`` so the unit response holds at every iterate;
* a constrained normalized LMS (CNLMS): a normalized stochastic-gradient
  step on the instantaneous output power followed by an exact affine
  projection back onto the constraint set (unit response alone, or unit
  response plus exact nulls).

The DDAA leakage ball lives in the normalized dual domain: the interference
channels are divided by their largest singular value, so a batch budget
``epsilon`` corresponds to a dual radius-squared of
``epsilon / sigma_max(H_I)^2``.  ``run_online`` always takes the batch-scale
budget and converts.

Trial seeds follow the documented splitting rule ``master_seed XOR
trial_index``, so any subset of trials is reproducible in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from ._kernels import fallback as _reference
from .scenarios import Scenario, SourceModel, generate_block

__all__ = [
    "DdaaState",
    "CnlmsState",
    "OnlineRunResult",
    "ddaa_step",
    "cnlms_step",
    "run_online",
    "trailing_mean",
]

_ALGORITHMS = ("ddaa", "cnlms_mvdr", "cnlms_zf")


@dataclass(frozen=True)
class DdaaState:
    """State of the dual-domain adaptive algorithm.

    ``epsilon`` is the dual-domain radius squared (batch budget divided by
    ``sigma_max**2``); ``step`` must lie in ``(0, 2)``.
    """

    weights: np.ndarray
    desired_channel: np.ndarray
    normalized_channels: np.ndarray
    epsilon: float
    step: float = 0.1
    alpha: float = 0.5
    sigma_max: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.step < 2.0:
            raise ValueError("step must lie in (0, 2)")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be nonnegative")

    @classmethod
    def initialize(cls, desired_channel: np.ndarray,
                   interference_channels: np.ndarray, leakage_budget: float,
                   step: float = 0.1, alpha: float = 0.5) -> "DdaaState":
        """Start from the minimum-norm unit-response point ``h_0 / ||h_0||^2``.

        ``leakage_budget`` is on the batch scale (same meaning as the batch
        solver's ``epsilon``); it is converted to the normalized dual domain
        internally.
        """
        h0 = np.asarray(desired_channel, dtype=complex)
        h_int = np.asarray(interference_channels, dtype=complex)
        sigma_max = float(np.linalg.svd(h_int, compute_uv=False)[0])
        if sigma_max <= 0.0:
            raise ValueError("interference channels are all zero")
        w0 = h0 / np.real(np.vdot(h0, h0))
        return cls(weights=w0, desired_channel=h0,
                   normalized_channels=h_int / sigma_max,
                   epsilon=leakage_budget / sigma_max**2,
                   step=step, alpha=alpha, sigma_max=sigma_max)

    @property
    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the plane of feasible displacements."""
        h0 = self.desired_channel
        n = h0.shape[0]
        return np.eye(n) - np.outer(h0, h0.conj()) / np.real(np.vdot(h0, h0))


def ddaa_step(state: DdaaState, snapshot: np.ndarray) -> DdaaState:
    """Advance the dual-domain algorithm by one snapshot."""
    h0 = state.desired_channel
    w = _reference.ddaa_update(
        state.weights, np.asarray(snapshot, dtype=complex), h0,
        float(np.real(np.vdot(h0, h0))), state.normalized_channels,
        state.epsilon, state.step, state.alpha,
    )
    return replace(state, weights=w)


@dataclass(frozen=True)
class CnlmsState:
    """State of the constrained normalized LMS.

    ``constraint_channels`` holds one column per constraint and
    ``constraint_targets`` the required responses ``w^H a_m = b_m``.
    """

    weights: np.ndarray
    constraint_channels: np.ndarray
    constraint_targets: np.ndarray
    projector: np.ndarray
    feasible_point: np.ndarray
    step: float = 0.1
    regularizer: float = 1e-12

    def __post_init__(self) -> None:
        if not 0.0 < self.step < 2.0:
            raise ValueError("step must lie in (0, 2)")
        if self.regularizer < 0.0:
            raise ValueError("regularizer must be nonnegative")

    @classmethod
    def initialize(cls, constraint_channels: np.ndarray,
                   constraint_targets: np.ndarray, step: float = 0.1,
                   regularizer: float = 1e-12) -> "CnlmsState":
        """Start from the minimum-norm point of the constraint set."""
        a = np.asarray(constraint_channels, dtype=complex)
        b = np.asarray(constraint_targets, dtype=complex)
        if a.ndim != 2 or b.shape != (a.shape[1],):
            raise ValueError("need one target per constraint column")
        gram = a.conj().T @ a
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > 1e14:
            raise np.linalg.LinAlgError(
                f"constraint channels are numerically collinear "
                f"(condition estimate {cond:.3e})"
            )
        coeffs = np.linalg.solve(gram, np.eye(a.shape[1], dtype=complex))
        projector = np.eye(a.shape[0], dtype=complex) - a @ coeffs @ a.conj().T
        feasible = a @ (coeffs @ b)
        return cls(weights=feasible, constraint_channels=a,
                   constraint_targets=b, projector=projector,
                   feasible_point=feasible, step=step, regularizer=regularizer)

    @classmethod
    def mvdr_mode(cls, desired_channel: np.ndarray, step: float = 0.1,
                  regularizer: float = 1e-12) -> "CnlmsState":
        """Unit response on the desired channel only."""
        h0 = np.asarray(desired_channel, dtype=complex)
        return cls.initialize(h0[:, None], np.array([1.0 + 0.0j]),
                              step=step, regularizer=regularizer)

    @classmethod
    def zf_mode(cls, channels: np.ndarray, step: float = 0.1,
                regularizer: float = 1e-12) -> "CnlmsState":
        """Unit response on column 0, exact nulls on the remaining columns."""
        h = np.asarray(channels, dtype=complex)
        targets = np.zeros(h.shape[1], dtype=complex)
        targets[0] = 1.0
        return cls.initialize(h, targets, step=step, regularizer=regularizer)


def cnlms_step(state: CnlmsState, snapshot: np.ndarray) -> CnlmsState:
    """Advance the constrained normalized LMS by one snapshot."""
    w = _reference.cnlms_update(
        state.weights, np.asarray(snapshot, dtype=complex), state.projector,
        state.feasible_point, state.step, state.regularizer,
    )
    return replace(state, weights=w)


def trailing_mean(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing moving average; shorter prefixes average what is available."""
    if window < 1:
        raise ValueError("window must be positive")
    values = np.asarray(values, dtype=float)
    csum = np.cumsum(values)
    out = np.empty_like(values)
    head = min(window, values.size)
    out[:head] = csum[:head] / np.arange(1, head + 1)
    if values.size > window:
        out[window:] = (csum[window:] - csum[:-window]) / window
    return out


@dataclass(frozen=True)
class OnlineRunResult:
    """Trial-averaged learning curve plus convergence diagnostics.

    ``mean_squared_error[k]`` is the a-priori squared error at iteration k
    averaged over trials; ``smoothed`` applies a trailing mean.
    ``max_distortionless_error`` is the worst ``|w^H h_0 - 1|`` seen at any
    iterate of any trial; ``max_nulling_residual`` (ZF-mode CNLMS only) is
    the worst ``|w^H h_j|`` over the nulled channels.
    """

    algorithm: str
    mean_squared_error: np.ndarray
    smoothed: np.ndarray
    final_weights: np.ndarray
    max_distortionless_error: float
    max_nulling_residual: float | None
    n_trials: int
    backend: str


def run_online(
    algorithm: str,
    scenario: Scenario,
    source_models: list[SourceModel],
    n_iterations: int,
    n_trials: int,
    master_seed: int,
    *,
    leakage_budget: float | None = None,
    step: float = 0.1,
    alpha: float = 0.5,
    regularizer: float = 1e-12,
    smoothing_window: int = 30,
) -> OnlineRunResult:
    """Average an online algorithm's learning curve over independent trials.

    Each trial draws a fresh snapshot block with seed
    ``master_seed XOR trial_index`` and runs the algorithm once through it;
    per-iteration squared errors are averaged across trials.  ``algorithm``
    is one of ``"ddaa"`` (requires the batch-scale ``leakage_budget``),
    ``"cnlms_mvdr"``, or ``"cnlms_zf"``.
    """
    if algorithm not in _ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; "
                         f"expected one of {_ALGORITHMS}")
    if n_trials < 1:
        raise ValueError("need at least one trial")
    if n_iterations < 0:
        raise ValueError("n_iterations must be nonnegative")

    h0 = scenario.desired_channel
    if algorithm == "ddaa":
        if leakage_budget is None:
            raise ValueError("ddaa needs a leakage_budget")
        init = DdaaState.initialize(h0, scenario.interference_channels,
                                    leakage_budget, step=step, alpha=alpha)
    elif algorithm == "cnlms_mvdr":
        init = CnlmsState.initialize(h0[:, None], np.array([1.0 + 0.0j]),
                                     step=step, regularizer=regularizer)
    else:
        targets = np.zeros(scenario.n_interferers + 1, dtype=complex)
        targets[0] = 1.0
        init = CnlmsState.initialize(scenario.channels, targets,
                                     step=step, regularizer=regularizer)

    err_accum = np.zeros(n_iterations)
    finals = np.empty((n_trials, scenario.n_sensors), dtype=complex)
    max_dist = 0.0
    max_null = 0.0 if algorithm == "cnlms_zf" else None

    # The compiled kernels take writable C-contiguous buffers; state arrays
    # may be frozen views, so copy the trial-invariant ones once up front.
    def _carr(a):
        return np.array(a, dtype=np.complex128, order="C", copy=True)

    w0 = _carr(init.weights)
    if algorithm == "ddaa":
        args = (_carr(h0), _carr(init.normalized_channels))
    else:
        args = (_carr(init.constraint_channels), _carr(init.constraint_targets),
                _carr(init.projector), _carr(init.feasible_point))

    for trial in range(n_trials):
        block = generate_block(scenario, source_models, n_iterations,
                               master_seed ^ trial)
        snapshots = np.ascontiguousarray(block.snapshots.T)
        desired = np.ascontiguousarray(block.sources[0])
        if algorithm == "ddaa":
            err_sq, w, dev = _kernels.ddaa_run(
                w0, snapshots, desired, *args, init.epsilon, step, alpha,
            )
            max_dist = max(max_dist, float(dev))
        else:
            err_sq, w, dev = _kernels.cnlms_run(
                w0, snapshots, desired, *args, step, regularizer,
            )
            max_dist = max(max_dist, float(dev[0]))
            if algorithm == "cnlms_zf":
                max_null = max(max_null, float(dev[1:].max(initial=0.0)))
        err_accum += err_sq
        finals[trial] = w

    curve = err_accum / n_trials
    smoothed = trailing_mean(curve, smoothing_window) if n_iterations else curve
    return OnlineRunResult(
        algorithm=algorithm,
        mean_squared_error=curve,
        smoothed=smoothed,
        final_weights=finals,
        max_distortionless_error=float(max_dist),
        max_nulling_residual=max_null,
        n_trials=n_trials,
        backend=_kernels.backend(),
    )
