"""Snapshot covariance construction and the interference Gram factors.

Analytic covariances come straight from the scenario statistics,
``R = H C H^H + noise_power * I``; sample covariances average snapshot outer
products.  Both are symmetrized to be exactly Hermitian so downstream
Cholesky-based solvers never see asymmetry noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .scenarios import Scenario

__all__ = [
    "CovarianceEstimate",
    "InterferenceGram",
    "analytic_covariance",
    "sample_covariance",
    "interference_gram",
    "covariance_matrix",
    "hermitian_solve",
]

_HERMITIAN_TOL = 1e-12
_PSD_TOL = 1e-10


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


@dataclass(frozen=True)
class CovarianceEstimate:
    """Hermitian PSD snapshot covariance with its provenance.

    ``kind`` is "analytic" for moment-based matrices (``sample_count`` 0) or
    "sample" for averaged outer products.
    """

    matrix: np.ndarray
    sample_count: int
    kind: str

    def __post_init__(self) -> None:
        matrix = np.ascontiguousarray(np.asarray(self.matrix, dtype=complex))
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("covariance must be square")
        scale = max(1.0, float(np.abs(matrix).max(initial=0.0)))
        if np.abs(matrix - matrix.conj().T).max(initial=0.0) > _HERMITIAN_TOL * scale:
            raise ValueError("covariance must be Hermitian")
        eigvals = np.linalg.eigvalsh(matrix)
        if eigvals[0] < -_PSD_TOL * max(1.0, eigvals[-1]):
            raise ValueError("covariance must be positive semidefinite")
        if self.kind not in ("analytic", "sample"):
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        if self.kind == "sample" and self.sample_count < 1:
            raise ValueError("sample covariance needs at least one snapshot")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n_sensors(self) -> int:
        return self.matrix.shape[0]


def analytic_covariance(scenario: Scenario) -> CovarianceEstimate:
    """Exact snapshot covariance ``H C H^H + noise_power * I``."""
    h = scenario.channels
    matrix = h @ scenario.source_cov @ h.conj().T
    matrix += scenario.noise_power * np.eye(scenario.n_sensors)
    return CovarianceEstimate(matrix=_symmetrize(matrix), sample_count=0,
                              kind="analytic")


def sample_covariance(snapshots: np.ndarray) -> CovarianceEstimate:
    """Average of snapshot outer products, ``(1/K) sum_k y_k y_k^H``."""
    snapshots = np.asarray(snapshots, dtype=complex)
    if snapshots.ndim != 2:
        raise ValueError("snapshots must be a (n_sensors, K) matrix")
    n_samples = snapshots.shape[1]
    if n_samples < 1:
        raise ValueError("need at least one snapshot")
    matrix = snapshots @ snapshots.conj().T / n_samples
    return CovarianceEstimate(matrix=_symmetrize(matrix),
                              sample_count=n_samples, kind="sample")


@dataclass(frozen=True)
class InterferenceGram:
    """Interference channel Gram matrix and its normalized channel matrix.

    ``normalized_channels`` divides the interference channels by their largest
    singular value, so the normalized matrix has spectral norm 1 (this is the
    scaling the dual-domain online algorithm works in).
    """

    gram: np.ndarray                 # (J, J) Hermitian PSD
    normalized_channels: np.ndarray  # (N, J)
    sigma_max: float

    @property
    def n_interferers(self) -> int:
        return self.gram.shape[0]


def interference_gram(scenario: Scenario) -> InterferenceGram:
    """Gram factors of the interference channels ``H_I``."""
    h_int = scenario.interference_channels
    if h_int.shape[1] == 0:
        raise ValueError("scenario has no interferers")
    gram = _symmetrize(h_int.conj().T @ h_int)
    sigma_max = float(np.linalg.svd(h_int, compute_uv=False)[0])
    return InterferenceGram(gram=gram, normalized_channels=h_int / sigma_max,
                            sigma_max=sigma_max)


def covariance_matrix(covariance) -> np.ndarray:
    """Accept either a CovarianceEstimate or a bare Hermitian ndarray."""
    if isinstance(covariance, CovarianceEstimate):
        return covariance.matrix
    return np.asarray(covariance, dtype=complex)


def hermitian_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` for Hermitian positive definite ``matrix``.

    Uses a Cholesky factorization; raises ``numpy.linalg.LinAlgError`` when
    the matrix is not positive definite (e.g. a singular covariance).
    """
    factor = cho_factor(matrix, lower=True, check_finite=False)
    return cho_solve(factor, rhs, check_finite=False)
