"""Shared helpers for the test suite: seeded random geometries and scenarios."""

import numpy as np

import rzfbeam as rb
from rzfbeam.theory import SingleInterferenceGeometry


def random_geometry(rng, real_only=False):
    """Draw a non-degenerate single-interferer geometry.

    ``tau`` stays away from 0 and pi/2 so neither channel overlap nor the
    zero-forcing direction degenerates; the source correlation stays strictly
    inside the Cauchy-Schwarz ball.
    """
    tau = rng.uniform(0.05, 1.45)
    sigma0_sq = rng.uniform(0.3, 2.0)
    sigma1_sq = rng.uniform(0.1, 3.0)
    sigma_n_sq = rng.uniform(0.05, 1.5)
    c1_abs = rng.uniform(0.0, 0.95) * np.sqrt(sigma0_sq * sigma1_sq)
    phi_z = 0.0 if real_only else rng.uniform(-np.pi, np.pi)
    phi_c = 0.0 if real_only else rng.uniform(-np.pi, np.pi)
    return SingleInterferenceGeometry(
        tau=tau, phi_z=phi_z, c1_abs=c1_abs, phi_c=phi_c,
        sigma1_sq=sigma1_sq, sigma_n_sq=sigma_n_sq, sigma0_sq=sigma0_sq,
    )


def random_channels(rng, n_sensors, n_sources):
    """Unit-norm complex Gaussian channel columns, resampled if ill-conditioned."""
    while True:
        h = rng.standard_normal((n_sensors, n_sources)) \
            + 1j * rng.standard_normal((n_sensors, n_sources))
        h = h / np.linalg.norm(h, axis=0, keepdims=True)
        if np.linalg.cond(h) < 50.0:
            return h


def random_scenario(rng, n_sensors=None, n_interferers=None):
    """Random calibrated scenario (returns the (scenario, models) pair)."""
    n = int(n_sensors) if n_sensors is not None else int(rng.integers(4, 17))
    j = int(n_interferers) if n_interferers is not None \
        else int(rng.integers(1, min(8, n)))
    channels = random_channels(rng, n, j + 1)
    return rb.build_from_channels(
        channels,
        rho=rng.uniform(0.1, 0.95),
        snr_db=rng.uniform(-5.0, 10.0),
        sir_db=rng.uniform(-10.0, 10.0),
        phases=rng.uniform(-np.pi, np.pi, size=j),
    )


def random_distortionless(rng, scenario, spread=0.5):
    """Random weight vector satisfying the unit-gain constraint on h0."""
    h0 = scenario.desired_channel
    base = h0 / np.real(np.vdot(h0, h0))
    v = rng.standard_normal(h0.size) + 1j * rng.standard_normal(h0.size)
    v = v - h0 * (np.vdot(h0, v) / np.vdot(h0, h0))
    return base + spread * v
