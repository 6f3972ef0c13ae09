"""Batch beamformer solvers under the unit-response constraint.

All solvers return weights with ``w^H h_0 = 1`` on the desired channel.  The
relaxed zero-forcing (RZF) family minimizes the output variance subject to an
interference-leakage budget ``||H_I^H w||^2 <= epsilon``; the two budget
extremes recover the classical solutions:

* ``epsilon >= epsilon_mvdr`` (the leakage the MVDR solution already has)
  leaves the constraint inactive, giving MVDR;
* ``epsilon = 0`` forces exact nulls, giving the zero-forcing solution.

Intermediate budgets are solved through the dual: for penalty ``lam`` the
minimizer is ``w = R_lam^{-1} h_0 / (h_0^H R_lam^{-1} h_0)`` with
``R_lam = R + lam * H_I H_I^H``, and the achieved leakage decreases
monotonically in ``lam``, so a bisection on ``lam`` meets any reachable
budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .covariance import covariance_matrix, hermitian_solve
from .scenarios import Scenario

__all__ = [
    "Beamformer",
    "RzfSolveReport",
    "mvdr",
    "zf",
    "rzf_from_lambda",
    "epsilon_mvdr",
    "rzf_from_epsilon",
    "mmse_dr",
    "a_mmse",
    "leakage",
]


@dataclass(frozen=True)
class Beamformer:
    """Weight vector with its label and solver parameters."""

    weights: np.ndarray
    label: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        weights = np.ascontiguousarray(np.asarray(self.weights, dtype=complex))
        if weights.ndim != 1:
            raise ValueError("weights must be a 1-D vector")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class RzfSolveReport:
    """Outcome of a leakage-budget solve.

    ``lambda_`` is the penalty that met the budget (0 when the budget was
    inactive, ``inf`` for the exact-null case), ``epsilon_achieved`` the
    leakage of the returned weights, and ``bracket`` the final bisection
    interval on the penalty.
    """

    lambda_: float
    epsilon_achieved: float
    epsilon_mvdr: float
    iterations: int
    bracket: tuple[float, float]


def leakage(weights: np.ndarray, interference_channels: np.ndarray) -> float:
    """Interference leakage ``||H_I^H w||^2``."""
    proj = interference_channels.conj().T @ weights
    return float(np.real(np.vdot(proj, proj)))


def _distortionless(solution: np.ndarray, desired_channel: np.ndarray) -> np.ndarray:
    gain = np.vdot(desired_channel, solution)  # h_0^H R^{-1} h_0, real positive
    if gain == 0:
        raise np.linalg.LinAlgError("degenerate solve: h_0^H R^{-1} h_0 = 0")
    return solution / gain


def mvdr(covariance, desired_channel: np.ndarray) -> Beamformer:
    """Minimum-variance distortionless-response weights.

    Solves ``min w^H R w`` subject to ``w^H h_0 = 1``; the solution is
    ``R^{-1} h_0`` scaled to unit response.  Raises
    ``numpy.linalg.LinAlgError`` for a singular covariance.
    """
    r = covariance_matrix(covariance)
    h0 = np.asarray(desired_channel, dtype=complex)
    w = _distortionless(hermitian_solve(r, h0), h0)
    return Beamformer(weights=w, label="MVDR", params={"lambda": 0.0})


def zf(covariance, channels: np.ndarray) -> Beamformer:
    """Zero-forcing weights: unit response on column 0, exact nulls elsewhere.

    Implements ``w = R^{-1} H (H^H R^{-1} H)^{-1} e_1``.  A rank-deficient
    constraint Gram (collinear channels) raises ``numpy.linalg.LinAlgError``
    carrying its condition estimate.
    """
    r = covariance_matrix(covariance)
    h = np.asarray(channels, dtype=complex)
    x = hermitian_solve(r, h)                    # R^{-1} H
    gram = 0.5 * (h.conj().T @ x + (h.conj().T @ x).conj().T)
    unit = np.zeros(h.shape[1], dtype=complex)
    unit[0] = 1.0
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e14:
        raise np.linalg.LinAlgError(
            f"zero-forcing constraint Gram is numerically singular "
            f"(condition estimate {cond:.3e})"
        )
    coeffs = np.linalg.solve(gram, unit)
    return Beamformer(weights=x @ coeffs, label="ZF", params={"epsilon": 0.0})


def rzf_from_lambda(covariance, desired_channel: np.ndarray,
                    interference_channels: np.ndarray, lam: float) -> Beamformer:
    """Leakage-penalized weights for a fixed penalty ``lam >= 0``.

    Minimizes ``w^H (R + lam * H_I H_I^H) w`` under unit response; ``lam = 0``
    reduces to MVDR and ``lam -> inf`` approaches the zero-forcing solution.
    """
    if lam < 0.0:
        raise ValueError("penalty must be nonnegative")
    r = covariance_matrix(covariance)
    h0 = np.asarray(desired_channel, dtype=complex)
    h_int = np.asarray(interference_channels, dtype=complex)
    if math.isinf(lam):
        w = zf(r, np.column_stack([h0, h_int])).weights
    else:
        r_lam = r + lam * (h_int @ h_int.conj().T)
        w = _distortionless(hermitian_solve(r_lam, h0), h0)
    return Beamformer(weights=w, label="RZF", params={"lambda": float(lam)})


def epsilon_mvdr(covariance, desired_channel: np.ndarray,
                 interference_channels: np.ndarray) -> float:
    """Leakage of the MVDR solution: budgets at or above it are inactive."""
    w = mvdr(covariance, desired_channel).weights
    return leakage(w, np.asarray(interference_channels, dtype=complex))


def rzf_from_epsilon(
    covariance,
    desired_channel: np.ndarray,
    interference_channels: np.ndarray,
    epsilon: float,
    *,
    leakage_tol: float = 1e-8,
    max_iterations: int = 200,
) -> tuple[Beamformer, RzfSolveReport]:
    """Solve the leakage-budget problem for a requested ``epsilon``.

    For budgets in ``(0, epsilon_mvdr)`` the penalty is found by bracketing
    (doubling) and bisection until the achieved leakage is within
    ``leakage_tol * max(epsilon, 1)`` of the budget and the penalty bracket is
    tight.  ``epsilon = 0`` returns the zero-forcing solution and budgets at
    or above ``epsilon_mvdr`` return MVDR with a zero penalty.
    """
    if epsilon < 0.0:
        raise ValueError("leakage budget must be nonnegative")
    r = covariance_matrix(covariance)
    h0 = np.asarray(desired_channel, dtype=complex)
    h_int = np.asarray(interference_channels, dtype=complex)

    bf_mvdr = mvdr(r, h0)
    eps_mvdr = leakage(bf_mvdr.weights, h_int)
    if epsilon >= eps_mvdr * (1.0 - 1e-12):
        report = RzfSolveReport(lambda_=0.0, epsilon_achieved=eps_mvdr,
                                epsilon_mvdr=eps_mvdr, iterations=0,
                                bracket=(0.0, 0.0))
        bf = Beamformer(weights=bf_mvdr.weights, label="RZF",
                        params={"lambda": 0.0, "epsilon": float(epsilon)})
        return bf, report
    if epsilon == 0.0:
        channels = np.column_stack([h0, h_int])
        bf_zf = zf(r, channels)
        achieved = leakage(bf_zf.weights, h_int)
        report = RzfSolveReport(lambda_=math.inf, epsilon_achieved=achieved,
                                epsilon_mvdr=eps_mvdr, iterations=0,
                                bracket=(math.inf, math.inf))
        bf = Beamformer(weights=bf_zf.weights, label="RZF",
                        params={"lambda": math.inf, "epsilon": 0.0})
        return bf, report

    outer = h_int @ h_int.conj().T

    def solve(lam: float) -> tuple[np.ndarray, float]:
        w = _distortionless(hermitian_solve(r + lam * outer, h0), h0)
        return w, leakage(w, h_int)

    # Bracket: leakage decreases in the penalty, so double until we overshoot.
    lo, leak_lo = 0.0, eps_mvdr
    hi = 1.0
    iterations = 0
    w_hi, leak_hi = solve(hi)
    while leak_hi >= epsilon and iterations < 100:
        lo, leak_lo = hi, leak_hi
        hi *= 2.0
        w_hi, leak_hi = solve(hi)
        iterations += 1
    if leak_hi >= epsilon:
        raise RuntimeError(
            f"leakage-budget bracketing failed: leakage {leak_hi:.3e} at "
            f"penalty {hi:.3e} still above budget {epsilon:.3e}"
        )

    tol = leakage_tol * max(epsilon, 1.0)
    w_best, lam_best, leak_best = w_hi, hi, leak_hi
    while iterations < max_iterations:
        mid = 0.5 * (lo + hi)
        w_mid, leak_mid = solve(mid)
        iterations += 1
        if abs(leak_mid - epsilon) < abs(leak_best - epsilon):
            w_best, lam_best, leak_best = w_mid, mid, leak_mid
        if leak_mid >= epsilon:
            lo = mid
        else:
            hi = mid
        if abs(leak_best - epsilon) <= tol and \
                (hi - lo) <= 1e-9 * max(1.0, hi):
            break
    else:
        raise RuntimeError(
            f"leakage-budget bisection did not converge within "
            f"{max_iterations} iterations (bracket [{lo:.6e}, {hi:.6e}], "
            f"achieved {leak_best:.6e}, budget {epsilon:.6e})"
        )

    report = RzfSolveReport(lambda_=lam_best, epsilon_achieved=leak_best,
                            epsilon_mvdr=eps_mvdr, iterations=iterations,
                            bracket=(lo, hi))
    bf = Beamformer(weights=w_best, label="RZF",
                    params={"lambda": lam_best, "epsilon": float(epsilon)})
    return bf, report


def mmse_dr(scenario: Scenario) -> Beamformer:
    """Distortionless weights that are MSE-optimal given exact statistics.

    Uses the interference-plus-noise surrogate
    ``noise_power * I + H_I C_I H_I^H`` (the desired-source terms drop out on
    the constraint set), then scales to unit response.  Requires positive
    noise power.
    """
    if scenario.noise_power <= 0.0:
        raise ValueError("mmse_dr needs positive noise power")
    h_int = scenario.interference_channels
    block = scenario.source_cov[1:, 1:]
    surrogate = h_int @ block @ h_int.conj().T
    surrogate = 0.5 * (surrogate + surrogate.conj().T)
    surrogate += scenario.noise_power * np.eye(scenario.n_sensors)
    h0 = scenario.desired_channel
    w = _distortionless(hermitian_solve(surrogate, h0), h0)
    return Beamformer(weights=w, label="MMSE_DR")


def a_mmse(covariance, desired_channel: np.ndarray,
           interference_channels: np.ndarray, desired_power_estimate: float,
           correlation_estimates: np.ndarray) -> Beamformer:
    """Unconstrained MMSE weights built from estimated statistics.

    Solves ``R w = sigma0_hat^2 h_0 + sum_j c_hat_j h_j`` where ``c_hat_j``
    estimates ``E[s_0(k)* s_j(k)]``.  With exact estimates this is the global
    linear-MMSE solution; it does not enforce the unit-response constraint.
    """
    if desired_power_estimate < 0.0:
        raise ValueError("desired power estimate must be nonnegative")
    r = covariance_matrix(covariance)
    h0 = np.asarray(desired_channel, dtype=complex)
    h_int = np.asarray(interference_channels, dtype=complex)
    c_hat = np.asarray(correlation_estimates, dtype=complex)
    if c_hat.shape != (h_int.shape[1],):
        raise ValueError("one correlation estimate per interferer required")
    rhs = desired_power_estimate * h0 + h_int @ c_hat
    w = hermitian_solve(r, rhs)
    return Beamformer(weights=w, label="A_MMSE",
                      params={"desired_power_estimate": float(desired_power_estimate)})
