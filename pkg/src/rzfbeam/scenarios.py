"""Scenario definitions and signal synthesis for correlated-interference beamforming.

A scenario bundles the three statistical ingredients every solver in this
package consumes:

* unit-norm channel (steering) vectors for the desired source and each
  interferer, stacked as columns of an ``(n_sensors, n_sources)`` matrix;
* the Hermitian PSD source covariance ``C`` with entries
  ``C[l, j] = E[s_l(k) s_j(k)*]`` (index 0 is the desired source, so the
  first column holds the desired/interferer temporal correlations);
* the per-sensor white-noise power.

Interferers are synthesized from the shared-signal recipe

    s_j(k) = sigma_j * exp(i*phi_j) * (s_0(k) + v_j(k)) / sqrt(1 + leak),

with ``v_j ~ CN(0, leak)`` independent of everything else, which makes the
normalized correlation between desired source and interferer j equal to
``exp(i*phi_j) / sqrt(1 + leak)``.  All randomness flows through
``numpy.random.default_rng`` so every block is reproducible from its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "Scenario",
    "SourceModel",
    "SignalBlock",
    "LeadfieldMatrix",
    "ula_steering",
    "toy_doa_grid",
    "leak_power_for_correlation",
    "correlated_interference_cov",
    "stabilize_ar_coefficients",
    "generate_block",
    "calibrate_powers",
    "nominal_snr_sir",
    "build_toy",
    "build_from_channels",
    "load_leadfield",
]

_HERMITIAN_TOL = 1e-12
_UNIT_NORM_TOL = 1e-10
_PSD_TOL = 1e-10


def ula_steering(theta: float, n_sensors: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """Unit-norm steering vector of a uniform linear array.

    Parameters
    ----------
    theta : float
        Direction of arrival in radians, measured from array endfire,
        ``0 <= theta <= pi``.
    n_sensors : int
        Number of array elements.
    spacing_ratio : float
        Element spacing over carrier wavelength (default half wavelength).

    Returns
    -------
    ndarray
        Complex vector of shape ``(n_sensors,)`` with unit Euclidean norm.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"DOA must lie in [0, pi], got {theta!r}")
    if n_sensors < 1:
        raise ValueError("n_sensors must be positive")
    if spacing_ratio <= 0.0:
        raise ValueError("spacing_ratio must be positive")
    phase = 2.0 * math.pi * spacing_ratio * math.cos(theta)
    h = np.exp(1j * phase * np.arange(n_sensors))
    return h / math.sqrt(n_sensors)


def toy_doa_grid(n_interferers: int) -> np.ndarray:
    """Evenly spaced DOA grid with the desired source swapped into slot 0.

    The grid places ``n_interferers + 1`` sources at angles
    ``(j + 1) * pi / (n_interferers + 2)``; the desired source takes the grid
    value ``ceil((n_interferers + 1) / 3) * pi / (n_interferers + 2)`` and the
    interferer originally occupying that slot moves to the vacated position.
    """
    if n_interferers < 1:
        raise ValueError("need at least one interferer")
    grid = (np.arange(n_interferers + 1) + 1) * math.pi / (n_interferers + 2)
    slot = math.ceil((n_interferers + 1) / 3) - 1
    doas = grid.copy()
    doas[0], doas[slot] = grid[slot], grid[0]
    return doas


def leak_power_for_correlation(rho: float) -> float:
    """Leak power giving desired/interferer correlation magnitude ``rho``."""
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"correlation magnitude must lie in (0, 1], got {rho!r}")
    return 1.0 / rho**2 - 1.0


def correlated_interference_cov(
    powers: np.ndarray,
    phases: np.ndarray,
    leak_power: float,
    desired_power: float = 1.0,
) -> np.ndarray:
    """Source covariance implied by the shared-signal interference recipe.

    Parameters
    ----------
    powers : array_like
        Interferer power parameters ``sigma_j**2``, shape ``(J,)``.
    phases : array_like
        Interferer phase offsets ``phi_j`` in radians, shape ``(J,)``.
    leak_power : float
        Variance of the independent leak component ``v_j`` (same for all
        interferers); larger values mean weaker correlation.
    desired_power : float
        Power of the desired source (the recipe keeps interferer powers exact
        only for the conventional choice 1).

    Returns
    -------
    ndarray
        Hermitian PSD matrix of shape ``(J + 1, J + 1)`` storing
        ``E[s_l s_j*]``; row/column 0 belongs to the desired source.
    """
    powers = np.atleast_1d(np.asarray(powers, dtype=float))
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    if powers.shape != phases.shape:
        raise ValueError("powers and phases must have matching shapes")
    if np.any(powers < 0.0):
        raise ValueError("interferer powers must be nonnegative")
    if leak_power < 0.0:
        raise ValueError("leak_power must be nonnegative")
    if desired_power <= 0.0:
        raise ValueError("desired_power must be positive")

    n = powers.size
    amp = np.sqrt(powers) * np.exp(1j * phases)
    cov = np.zeros((n + 1, n + 1), dtype=complex)
    cov[0, 0] = desired_power
    cross = amp * desired_power / math.sqrt(1.0 + leak_power)
    cov[1:, 0] = cross
    cov[0, 1:] = cross.conj()
    block = np.outer(amp, amp.conj()) * desired_power / (1.0 + leak_power)
    block += np.diag(powers * leak_power / (1.0 + leak_power))
    cov[1:, 1:] = block
    return cov


def _check_hermitian_psd(matrix: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.abs(matrix).max(initial=0.0)))
    if np.abs(matrix - matrix.conj().T).max(initial=0.0) > _HERMITIAN_TOL * scale:
        raise ValueError(f"{what} must be Hermitian")
    eigvals = np.linalg.eigvalsh(matrix)
    if eigvals[0] < -_PSD_TOL * max(1.0, eigvals[-1]):
        raise ValueError(f"{what} must be positive semidefinite "
                         f"(min eigenvalue {eigvals[0]:.3e})")


@dataclass(frozen=True)
class Scenario:
    """Statistical description of one beamforming problem.

    Attributes
    ----------
    channels : ndarray
        Complex matrix of shape ``(n_sensors, n_interferers + 1)`` whose
        columns are unit-norm channel vectors; column 0 is the desired source.
    source_cov : ndarray
        Hermitian PSD source covariance, entries ``E[s_l s_j*]``.
    noise_power : float
        Per-sensor white-noise variance.
    """

    channels: np.ndarray
    source_cov: np.ndarray
    noise_power: float

    def __post_init__(self) -> None:
        channels = np.ascontiguousarray(np.asarray(self.channels, dtype=complex))
        cov = np.ascontiguousarray(np.asarray(self.source_cov, dtype=complex))
        if channels.ndim != 2 or channels.shape[1] < 1:
            raise ValueError("channels must be a 2-D matrix with >= 1 column")
        if cov.shape != (channels.shape[1], channels.shape[1]):
            raise ValueError("source_cov shape must match the number of sources")
        norms = np.linalg.norm(channels, axis=0)
        if np.abs(norms - 1.0).max() > _UNIT_NORM_TOL:
            raise ValueError("channel columns must have unit norm")
        _check_hermitian_psd(cov, "source_cov")
        diag = np.real(np.diag(cov))
        bound = np.sqrt(np.outer(diag, diag))
        if np.any(np.abs(cov) > bound * (1.0 + 1e-10) + 1e-14):
            raise ValueError("source_cov violates the Cauchy-Schwarz bound")
        if self.noise_power < 0.0:
            raise ValueError("noise_power must be nonnegative")
        channels.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "source_cov", cov)
        object.__setattr__(self, "noise_power", float(self.noise_power))

    @property
    def n_sensors(self) -> int:
        return self.channels.shape[0]

    @property
    def n_interferers(self) -> int:
        return self.channels.shape[1] - 1

    @property
    def desired_channel(self) -> np.ndarray:
        return self.channels[:, 0]

    @property
    def interference_channels(self) -> np.ndarray:
        return self.channels[:, 1:]

    @property
    def desired_power(self) -> float:
        return float(np.real(self.source_cov[0, 0]))

    @property
    def interferer_powers(self) -> np.ndarray:
        return np.real(np.diag(self.source_cov))[1:]

    @property
    def temporal_correlations(self) -> np.ndarray:
        """Vector of ``E[s_0(k)* s_j(k)]`` for the interferers."""
        return self.source_cov[1:, 0].copy()


def stabilize_ar_coefficients(
    coefficients: np.ndarray, target_radius: float = 0.99
) -> tuple[np.ndarray, float]:
    """Contract AR poles inside the unit circle when the recursion is unstable.

    The recursion ``s(k) = sum_m a_m s(k - m) + w(k)`` is stable iff the
    companion-matrix spectral radius is below one.  When it is not, scaling
    ``a_m`` by ``(target_radius / radius) ** m`` moves every pole radially to
    ``target_radius / radius`` times its original modulus, which preserves the
    spectral shape while guaranteeing stability.  A flat scale of the whole
    coefficient vector would not: the all-0.2 order-6 recursion stays unstable
    under any flat scale above 5/6.

    Returns the (possibly rescaled) coefficients and the original radius.
    """
    coeffs = np.atleast_1d(np.asarray(coefficients, dtype=float))
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ValueError("AR coefficients must form a nonempty 1-D array")
    poly = np.concatenate(([1.0], -coeffs))
    radius = float(np.abs(np.roots(poly)).max())
    if radius < 1.0:
        return coeffs.copy(), radius
    contraction = target_radius / radius
    powers = contraction ** np.arange(1, coeffs.size + 1)
    return coeffs * powers, radius


@dataclass(frozen=True)
class SourceModel:
    """Generator recipe for one source.

    ``kind`` selects the desired-source waveform ("white_gaussian" or
    "ar_process"); interferer models reuse ``relative_phase`` (``phi_j``) and
    ``leak_power`` (variance of the independent component) from the shared
    recipe and ignore the AR fields.
    """

    kind: str = "white_gaussian"
    ar_coefficients: np.ndarray | None = None
    innovation_power: float = 1.0
    relative_phase: float = 0.0
    leak_power: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("white_gaussian", "ar_process"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "ar_process":
            if self.ar_coefficients is None:
                raise ValueError("ar_process model needs coefficients")
            coeffs, _ = stabilize_ar_coefficients(self.ar_coefficients)
            coeffs.setflags(write=False)
            object.__setattr__(self, "ar_coefficients", coeffs)
        if self.innovation_power <= 0.0:
            raise ValueError("innovation_power must be positive")
        if self.leak_power < 0.0:
            raise ValueError("leak_power must be nonnegative")

    @classmethod
    def white_gaussian(cls, relative_phase: float = 0.0,
                       leak_power: float = 0.0) -> "SourceModel":
        return cls(kind="white_gaussian", relative_phase=relative_phase,
                   leak_power=leak_power)

    @classmethod
    def ar_process(cls, coefficients, innovation_power: float = 1.0) -> "SourceModel":
        """AR desired source; unstable coefficient sets are contracted first."""
        return cls(kind="ar_process",
                   ar_coefficients=np.asarray(coefficients, dtype=float),
                   innovation_power=innovation_power)


@dataclass(frozen=True)
class SignalBlock:
    """One synthesized block of source waveforms, noise, and snapshots."""

    sources: np.ndarray    # (n_sources, K)
    noise: np.ndarray      # (n_sensors, K)
    snapshots: np.ndarray  # (n_sensors, K)

    @property
    def block_length(self) -> int:
        return self.snapshots.shape[1]


def _complex_normal(rng: np.random.Generator, power: float, *shape: int) -> np.ndarray:
    """Circular complex Gaussian draw with E|x|^2 = power."""
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _desired_waveform(model: SourceModel, power: float, length: int,
                      rng: np.random.Generator) -> np.ndarray:
    if model.kind == "white_gaussian":
        return _complex_normal(rng, power, length)
    coeffs = model.ar_coefficients
    burn = 10 * coeffs.size
    innovations = _complex_normal(rng, model.innovation_power, length + burn)
    filtered = lfilter([1.0], np.concatenate(([1.0], -coeffs)), innovations)
    block = filtered[burn:]
    rms = math.sqrt(float(np.mean(np.abs(block) ** 2)))
    if rms == 0.0:
        raise ValueError("degenerate AR block (zero variance)")
    return block * (math.sqrt(power) / rms)


def _generate_with_rng(scenario: Scenario, source_models: list[SourceModel],
                       block_length: int, rng: np.random.Generator) -> SignalBlock:
    n_sources = scenario.n_interferers + 1
    if len(source_models) != n_sources:
        raise ValueError(f"expected {n_sources} source models, "
                         f"got {len(source_models)}")
    if block_length < 0:
        raise ValueError("block_length must be nonnegative")

    sources = np.zeros((n_sources, block_length), dtype=complex)
    desired = _desired_waveform(source_models[0], scenario.desired_power,
                                block_length, rng)
    sources[0] = desired
    powers = scenario.interferer_powers
    for j in range(1, n_sources):
        model = source_models[j]
        leak = model.leak_power
        v = _complex_normal(rng, leak, block_length) if leak > 0.0 else 0.0
        amp = math.sqrt(powers[j - 1] / (1.0 + leak))
        sources[j] = amp * np.exp(1j * model.relative_phase) * (desired + v)
    noise = _complex_normal(rng, scenario.noise_power,
                            scenario.n_sensors, block_length)
    snapshots = scenario.channels @ sources + noise
    return SignalBlock(sources=sources, noise=noise, snapshots=snapshots)


def generate_block(scenario: Scenario, source_models: list[SourceModel],
                   block_length: int, rng_seed: int) -> SignalBlock:
    """Draw one reproducible snapshot block.

    Source waveforms follow the shared-signal recipe (interferer j scales and
    phase-rotates the desired waveform plus an independent leak), noise is
    circular complex Gaussian, and ``snapshots = channels @ sources + noise``
    holds exactly.  The same ``(scenario, source_models, block_length,
    rng_seed)`` tuple always reproduces the same block.
    """
    rng = np.random.default_rng(rng_seed)
    return _generate_with_rng(scenario, source_models, block_length, rng)


def calibrate_powers(scenario: Scenario, snr_db: float, sir_db: float) -> Scenario:
    """Rescale noise and interference to hit array-level SNR and SIR targets.

    SNR is desired field power over total noise power,
    ``sigma_0^2 ||h_0||^2 / (N sigma_n^2)``; SIR is desired field power over
    the total interference field power ``trace(H_I C_I H_I^H)`` (which keeps
    all cross-interferer correlation terms).  Interference is scaled by one
    common factor so relative interferer powers and all normalized
    correlations are preserved.  ``sir_db=inf`` zeroes the interference.
    """
    h0 = scenario.desired_channel
    desired_field = scenario.desired_power * float(np.real(np.vdot(h0, h0)))
    n = scenario.n_sensors
    noise_power = desired_field / (n * 10.0 ** (snr_db / 10.0))

    cov = scenario.source_cov.copy()
    if math.isinf(sir_db) and sir_db > 0:
        scale = 0.0
    else:
        h_int = scenario.interference_channels
        block = cov[1:, 1:]
        current = float(np.real(np.trace(h_int @ block @ h_int.conj().T)))
        if current <= 0.0:
            raise ValueError("cannot calibrate SIR: interference field power is zero")
        target = desired_field * 10.0 ** (-sir_db / 10.0)
        scale = target / current
    cov[1:, 1:] *= scale
    root = math.sqrt(scale)
    cov[0, 1:] *= root
    cov[1:, 0] *= root
    return Scenario(channels=scenario.channels, source_cov=cov,
                    noise_power=noise_power)


def nominal_snr_sir(scenario: Scenario) -> tuple[float, float]:
    """Array-level SNR and SIR (dB) implied by the scenario statistics."""
    h0 = scenario.desired_channel
    desired_field = scenario.desired_power * float(np.real(np.vdot(h0, h0)))
    snr = desired_field / (scenario.n_sensors * scenario.noise_power)
    h_int = scenario.interference_channels
    block = scenario.source_cov[1:, 1:]
    interference = float(np.real(np.trace(h_int @ block @ h_int.conj().T)))
    sir_db = math.inf if interference <= 0.0 else \
        10.0 * math.log10(desired_field / interference)
    return 10.0 * math.log10(snr), sir_db


def _as_phase_array(phases, n_interferers: int) -> np.ndarray:
    arr = np.asarray(phases, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n_interferers, float(arr))
    if arr.shape != (n_interferers,):
        raise ValueError("phases must be scalar or one value per interferer")
    return arr


def build_from_channels(
    channels: np.ndarray,
    *,
    rho: float = 0.6,
    snr_db: float = 0.0,
    sir_db: float = 0.0,
    phases=0.0,
    desired: SourceModel | None = None,
    desired_power: float = 1.0,
) -> tuple[Scenario, list[SourceModel]]:
    """Assemble a calibrated scenario and matching generator models.

    ``rho`` is the magnitude of the normalized desired/interferer correlation
    (all interferers share one leak power); ``phases`` holds the interferer
    phase offsets.  Returns the scenario together with the source-model list
    accepted by :func:`generate_block`.
    """
    channels = np.asarray(channels, dtype=complex)
    n_interferers = channels.shape[1] - 1
    if n_interferers < 1:
        raise ValueError("need at least one interferer column")
    phase_arr = _as_phase_array(phases, n_interferers)
    leak = leak_power_for_correlation(rho)
    cov = correlated_interference_cov(np.ones(n_interferers), phase_arr,
                                      leak, desired_power)
    scenario = Scenario(channels=channels, source_cov=cov, noise_power=1.0)
    scenario = calibrate_powers(scenario, snr_db, sir_db)
    desired_model = desired if desired is not None else SourceModel.white_gaussian()
    models = [desired_model] + [
        SourceModel.white_gaussian(relative_phase=phi, leak_power=leak)
        for phi in phase_arr
    ]
    return scenario, models


def build_toy(
    n_sensors: int,
    n_interferers: int,
    *,
    rho: float = 0.6,
    snr_db: float = 0.0,
    sir_db: float = 0.0,
    phases=0.0,
    spacing_ratio: float = 0.5,
    desired: SourceModel | None = None,
) -> tuple[Scenario, list[SourceModel]]:
    """Uniform-linear-array scenario on the evenly spaced DOA grid."""
    doas = toy_doa_grid(n_interferers)
    channels = np.column_stack(
        [ula_steering(theta, n_sensors, spacing_ratio) for theta in doas]
    )
    return build_from_channels(channels, rho=rho, snr_db=snr_db, sir_db=sir_db,
                               phases=phases, desired=desired)


@dataclass(frozen=True)
class LeadfieldMatrix:
    """Channel matrix loaded from a text leadfield file."""

    channels: np.ndarray       # (n_sensors, n_sources), unit-norm columns
    column_scales: np.ndarray  # original column norms
    path: str


def _parse_leadfield_token(token: str, path: str, lineno: int) -> complex:
    try:
        return complex(token.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise ValueError(
            f"{path}:{lineno}: cannot parse leadfield entry {token!r}"
        ) from None


def load_leadfield(path: str) -> LeadfieldMatrix:
    """Read a whitespace-separated leadfield matrix from a text file.

    Rows are sensors, columns are sources (column 0 = desired source).
    Entries may be real (``0.25``) or complex in ``a+bi`` / ``a-bi`` form;
    blank lines and ``#`` comments are skipped.  Columns are renormalized to
    unit norm and the original norms are returned as ``column_scales``.
    """
    rows: list[list[complex]] = []
    n_cols: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if n_cols is None:
                n_cols = len(tokens)
            elif len(tokens) != n_cols:
                raise ValueError(
                    f"{path}:{lineno}: expected {n_cols} entries, "
                    f"found {len(tokens)}"
                )
            rows.append([_parse_leadfield_token(t, path, lineno)
                         for t in tokens])
    if not rows:
        raise ValueError(f"{path}: leadfield file contains no data rows")
    matrix = np.asarray(rows, dtype=complex)
    norms = np.linalg.norm(matrix, axis=0)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValueError(f"{path}: column {zero[0]} has zero norm")
    return LeadfieldMatrix(channels=matrix / norms, column_scales=norms,
                           path=path)
