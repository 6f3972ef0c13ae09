"""Closed-form MSE analysis for a single temporally correlated interferer.

With unit-norm channels the two-source problem is fully described by four
numbers plus the powers: the channel overlap ``<h_0, h_1> = sin(tau) *
exp(i*phi_z)`` and the desired/interferer correlation ``c_1 = |c_1| *
exp(i*phi_c)``.  Everything here works on that reduced geometry.

The central object is the output MSE of the leakage-penalized beamformer as a
function of the penalty ``lam``.  Writing ``D = sigma1^2 cos^2(tau) +
sigma_n^2`` and ``g(lam) = cos^2(tau) * lam + D``, the MSE is a quadratic in
``x = 1/g(lam)``:

    mse(lam) = |delta2|^2 * D * x^2 - 2 * sigma_n^2 * delta1 * tan(tau) * x
               + sigma_n^2 * (tan^2(tau) + 1),

with ``delta1 = sigma_n^2 tan(tau) - |c_1| cos(tau) cos(phi_c + phi_z)`` and
``delta2 = sigma_n^2 tan(tau) - |c_1| cos(tau) exp(i (phi_c + phi_z))``.
The curvature ratio ``gamma = delta1 * sigma_n^2 * tan(tau) / |delta2|^2``
locates the minimizer: the penalty path ends at the zero-forcing solution for
``gamma <= 0``, has an interior optimum for ``gamma`` in ``(0, 1)``, and
starts at the MVDR solution for ``gamma >= 1``; ``delta2 = 0`` makes the MSE
flat in the penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenarios import Scenario

__all__ = [
    "SingleInterferenceGeometry",
    "RegimeReport",
    "AchievedMse",
    "mse_closed_form",
    "reduce_to_2d",
    "geometry_from_scenario",
    "two_channel_scenario",
    "mse_of_lambda",
    "regime",
    "achieved_mse",
    "superiority_witness",
    "per_source_gamma",
]

REGIME_CONSTANT = "constant"
REGIME_ZF = "zf_optimal"
REGIME_INTERIOR = "interior"
REGIME_MVDR = "mvdr_optimal"


@dataclass(frozen=True)
class SingleInterferenceGeometry:
    """Reduced description of a one-interferer problem.

    ``tau`` in ``[0, pi/2)`` and ``phi_z`` give the channel overlap
    ``sin(tau) * exp(i*phi_z)``; ``c1_abs`` and ``phi_c`` give the temporal
    correlation ``E[s_0(k)* s_1(k)]``.  Noise power must be positive.
    """

    tau: float
    phi_z: float
    c1_abs: float
    phi_c: float
    sigma1_sq: float
    sigma_n_sq: float
    sigma0_sq: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau < math.pi / 2.0:
            raise ValueError("tau must lie in [0, pi/2)")
        if self.c1_abs < 0.0:
            raise ValueError("c1_abs is a magnitude and must be nonnegative")
        if self.sigma1_sq < 0.0 or self.sigma0_sq <= 0.0:
            raise ValueError("source powers must be nonnegative (desired positive)")
        if self.sigma_n_sq <= 0.0:
            raise ValueError("noise power must be positive")
        bound = math.sqrt(self.sigma0_sq * self.sigma1_sq)
        if self.c1_abs > bound * (1.0 + 1e-12) + 1e-300:
            raise ValueError(
                f"|c_1| = {self.c1_abs:.6e} exceeds the Cauchy-Schwarz bound "
                f"{bound:.6e}"
            )

    @classmethod
    def from_real(cls, tau: float, c1: float, sigma1_sq: float,
                  sigma_n_sq: float, sigma0_sq: float = 1.0
                  ) -> "SingleInterferenceGeometry":
        """Real-overlap convenience constructor.

        Accepts a signed ``tau`` in ``(-pi/2, pi/2)`` (sign folded into
        ``phi_z``) and a signed correlation ``c1`` (sign folded into
        ``phi_c``).
        """
        if not -math.pi / 2.0 < tau < math.pi / 2.0:
            raise ValueError("tau must lie in (-pi/2, pi/2)")
        return cls(tau=abs(tau), phi_z=0.0 if tau >= 0.0 else math.pi,
                   c1_abs=abs(c1), phi_c=0.0 if c1 >= 0.0 else math.pi,
                   sigma1_sq=sigma1_sq, sigma_n_sq=sigma_n_sq,
                   sigma0_sq=sigma0_sq)

    @property
    def c1(self) -> complex:
        """Complex correlation ``E[s_0(k)* s_1(k)]``."""
        return self.c1_abs * complex(math.cos(self.phi_c), math.sin(self.phi_c))

    @property
    def channel_overlap(self) -> complex:
        """Inner product ``<h_0, h_1> = sin(tau) * exp(i*phi_z)``."""
        return math.sin(self.tau) * complex(math.cos(self.phi_z),
                                            math.sin(self.phi_z))


@dataclass(frozen=True)
class RegimeReport:
    """Location of the penalty-path MSE minimum for one geometry."""

    delta1: float
    delta2: complex
    gamma: float | None
    regime: str
    lambda_opt: float

    @property
    def delta2_abs_sq(self) -> float:
        return abs(self.delta2) ** 2


@dataclass(frozen=True)
class AchievedMse:
    """Best-case MSE of each beamformer on one geometry."""

    rzf: float
    mvdr: float
    zf: float
    mmse_dr: float


def mse_closed_form(weights: np.ndarray, scenario: Scenario) -> float:
    """Output MSE of arbitrary weights from the scenario statistics.

    Expands ``E|w^H y(k) - s_0(k)|^2`` using the source covariance: with
    coefficient ``b_0 = w^H h_0 - 1`` on the desired source and ``b_j =
    w^H h_j`` on each interferer, the MSE is
    ``noise_power * ||w||^2 + sum_{l,j} b_l E[s_l s_j*] b_j^*``.  Valid for
    any weights, distortionless or not.
    """
    w = np.asarray(weights, dtype=complex)
    if w.shape != (scenario.n_sensors,):
        raise ValueError("weights length must match the sensor count")
    coeffs = np.conj(scenario.channels.conj().T @ w)
    coeffs[0] -= 1.0
    quad = np.real(coeffs @ scenario.source_cov @ coeffs.conj())
    return float(scenario.noise_power * np.real(np.vdot(w, w)) + quad)


def reduce_to_2d(desired_channel: np.ndarray,
                 interferer_channel: np.ndarray) -> tuple[float, float]:
    """Overlap parameters ``(tau, phi_z)`` of one channel pair.

    Requires unit-norm, non-collinear channels; returns ``tau`` in
    ``[0, pi/2)`` with ``phi_z`` in ``[0, 2*pi)`` (zero for orthogonal
    channels by convention).
    """
    h0 = np.asarray(desired_channel, dtype=complex)
    h1 = np.asarray(interferer_channel, dtype=complex)
    for name, h in (("desired", h0), ("interferer", h1)):
        if abs(np.linalg.norm(h) - 1.0) > 1e-8:
            raise ValueError(f"{name} channel must have unit norm")
    overlap = complex(np.vdot(h0, h1))
    mag = abs(overlap)
    if mag >= 1.0 - 1e-12:
        raise ValueError("channels are (numerically) collinear")
    tau = math.asin(min(mag, 1.0))
    phi_z = math.atan2(overlap.imag, overlap.real) % (2.0 * math.pi) \
        if mag > 0.0 else 0.0
    return tau, phi_z


def geometry_from_scenario(scenario: Scenario) -> SingleInterferenceGeometry:
    """Reduced geometry of a one-interferer scenario."""
    if scenario.n_interferers != 1:
        raise ValueError("reduced geometry needs exactly one interferer")
    tau, phi_z = reduce_to_2d(scenario.channels[:, 0], scenario.channels[:, 1])
    c1 = complex(scenario.source_cov[1, 0])
    return SingleInterferenceGeometry(
        tau=tau, phi_z=phi_z, c1_abs=abs(c1),
        phi_c=math.atan2(c1.imag, c1.real) % (2.0 * math.pi),
        sigma1_sq=float(np.real(scenario.source_cov[1, 1])),
        sigma_n_sq=scenario.noise_power,
        sigma0_sq=float(np.real(scenario.source_cov[0, 0])),
    )


def two_channel_scenario(geometry: SingleInterferenceGeometry) -> Scenario:
    """Minimal two-sensor scenario realizing a reduced geometry.

    Places ``h_0 = [0, 1]`` and ``h_1 = [cos(tau), sin(tau) exp(i*phi_z)]``;
    any unitary embedding of these two columns yields identical beamformer
    MSEs, so this scenario is the canonical test bench for the closed forms.
    """
    z = geometry.channel_overlap
    channels = np.array([[0.0, math.cos(geometry.tau)], [1.0, z]],
                        dtype=complex)
    c1 = geometry.c1
    cov = np.array([[geometry.sigma0_sq, np.conj(c1)],
                    [c1, geometry.sigma1_sq]], dtype=complex)
    return Scenario(channels=channels, source_cov=cov,
                    noise_power=geometry.sigma_n_sq)


def _quadratic_terms(geometry: SingleInterferenceGeometry
                     ) -> tuple[float, complex, float, float, float]:
    """(delta1, delta2, D, tan_tau, constant term) of the MSE quadratic."""
    tan_tau = math.tan(geometry.tau)
    cos_tau = math.cos(geometry.tau)
    phase = geometry.phi_c + geometry.phi_z
    sn2 = geometry.sigma_n_sq
    delta1 = sn2 * tan_tau - geometry.c1_abs * cos_tau * math.cos(phase)
    delta2 = sn2 * tan_tau - geometry.c1_abs * cos_tau * complex(
        math.cos(phase), math.sin(phase))
    depth = geometry.sigma1_sq * cos_tau**2 + sn2
    constant = sn2 * (tan_tau**2 + 1.0)
    return delta1, delta2, depth, tan_tau, constant


def mse_of_lambda(geometry: SingleInterferenceGeometry, lam):
    """Closed-form MSE along the penalty path; accepts scalar or array ``lam``.

    ``lam = inf`` evaluates the zero-forcing limit exactly.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < 0.0):
        raise ValueError("penalty must be nonnegative")
    delta1, delta2, depth, tan_tau, constant = _quadratic_terms(geometry)
    cos_sq = math.cos(geometry.tau) ** 2
    x = 1.0 / (cos_sq * lam_arr + depth)
    mse = (abs(delta2) ** 2 * depth) * x**2 \
        - (2.0 * geometry.sigma_n_sq * delta1 * tan_tau) * x + constant
    return float(mse) if np.isscalar(lam) or lam_arr.ndim == 0 else mse


def regime(geometry: SingleInterferenceGeometry) -> RegimeReport:
    """Classify where the penalty-path MSE attains its minimum.

    Returns one of four regimes: ``constant`` (flat path, ``delta2 = 0``,
    ``gamma`` undefined), ``zf_optimal`` (monotone decreasing, optimum in the
    infinite-penalty limit), ``interior`` (finite positive optimal penalty),
    or ``mvdr_optimal`` (monotone increasing, optimum at zero penalty).
    """
    delta1, delta2, depth, tan_tau, _ = _quadratic_terms(geometry)
    cos_tau = math.cos(geometry.tau)
    scale = geometry.sigma_n_sq * tan_tau + geometry.c1_abs * cos_tau
    if abs(delta2) <= 1e-14 * scale or scale == 0.0:
        return RegimeReport(delta1=delta1, delta2=delta2, gamma=None,
                            regime=REGIME_CONSTANT, lambda_opt=0.0)
    gamma = delta1 * geometry.sigma_n_sq * tan_tau / abs(delta2) ** 2
    if gamma <= 0.0:
        return RegimeReport(delta1=delta1, delta2=delta2, gamma=gamma,
                            regime=REGIME_ZF, lambda_opt=math.inf)
    if gamma >= 1.0:
        return RegimeReport(delta1=delta1, delta2=delta2, gamma=gamma,
                            regime=REGIME_MVDR, lambda_opt=0.0)
    lambda_opt = depth / cos_tau**2 * (1.0 - gamma) / gamma
    return RegimeReport(delta1=delta1, delta2=delta2, gamma=gamma,
                        regime=REGIME_INTERIOR, lambda_opt=lambda_opt)


def achieved_mse(geometry: SingleInterferenceGeometry) -> AchievedMse:
    """Best-case MSE of RZF (at its optimal penalty), MVDR, ZF, and MMSE-DR."""
    delta1, delta2, depth, tan_tau, constant = _quadratic_terms(geometry)
    sn2 = geometry.sigma_n_sq
    cos_sq = math.cos(geometry.tau) ** 2
    mse_mvdr = (sn2 * (geometry.sigma1_sq + sn2)
                + geometry.c1_abs ** 2 * cos_sq) / depth
    mse_zf = constant
    mse_mmse_dr = sn2 * (geometry.sigma1_sq + sn2) / depth

    report = regime(geometry)
    if report.regime == REGIME_CONSTANT:
        mse_rzf = constant
    elif report.regime == REGIME_ZF:
        mse_rzf = mse_zf
    elif report.regime == REGIME_MVDR:
        mse_rzf = mse_mvdr
    else:
        excess = (1.0 - delta1**2 / abs(delta2) ** 2) \
            * sn2**2 * tan_tau**2 / depth
        mse_rzf = mse_mmse_dr + excess
    return AchievedMse(rzf=mse_rzf, mvdr=mse_mvdr, zf=mse_zf,
                       mmse_dr=mse_mmse_dr)


def superiority_witness(geometry: SingleInterferenceGeometry) -> bool:
    """True iff the tuned RZF beamformer strictly beats both MVDR and ZF.

    The predicate is ``0 < sigma_n^2 * delta1 * tan(tau) < |delta2|^2``,
    i.e. the curvature ratio ``gamma`` lies strictly inside ``(0, 1)`` so the
    penalty-path minimum is interior.  A handy sufficient condition is a
    nonzero correlation with ``sin(tau) * cos(phi_c + phi_z) < 0``.
    """
    return regime(geometry).regime == REGIME_INTERIOR


def per_source_gamma(scenario: Scenario) -> list[float | None]:
    """Curvature ratio of each interferer's pairwise reduced geometry.

    Treats interferer j in isolation against the desired source (overlap from
    the channel pair, correlation ``E[s_0* s_j]``, power from the covariance
    diagonal).  Entries are ``None`` where the pairwise path is flat.  This is
    a diagnostic: with several interferers the ratios indicate which sources
    reward a leakage budget, but no joint optimality claim is attached.
    """
    gammas: list[float | None] = []
    for j in range(1, scenario.n_interferers + 1):
        tau, phi_z = reduce_to_2d(scenario.channels[:, 0],
                                  scenario.channels[:, j])
        c_j = complex(scenario.source_cov[j, 0])
        geom = SingleInterferenceGeometry(
            tau=tau, phi_z=phi_z, c1_abs=abs(c_j),
            phi_c=math.atan2(c_j.imag, c_j.real) % (2.0 * math.pi),
            sigma1_sq=float(np.real(scenario.source_cov[j, j])),
            sigma_n_sq=scenario.noise_power,
            sigma0_sq=scenario.desired_power,
        )
        gammas.append(regime(geom).gamma)
    return gammas
