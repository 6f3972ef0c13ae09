"""Pure-NumPy kernels for the online algorithms.

These mirror the compiled Cython kernels exactly (same update order, same
guards) and serve both as the import-time fallback and as the reference the
compiled kernels are tested against.  Snapshots arrive row-per-iteration,
shape ``(n_iterations, n_sensors)``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["ddaa_run", "cnlms_run", "ddaa_update", "cnlms_update"]


def ddaa_update(w: np.ndarray, y: np.ndarray, h0: np.ndarray, h0_nsq: float,
                h_tilde: np.ndarray, epsilon: float, step: float,
                alpha: float) -> np.ndarray:
    """One dual-domain adaptive step; returns the updated weights.

    Combines two displacement directions inside the constraint plane
    ``w^H h_0 = 1``: the exact projection onto the instantaneous-zero-output
    hyperplane, and the pull-back of the dual-ball projection of the
    normalized leakage vector.  The adaptive scale factor makes the combined
    step at least as long as either displacement alone.
    """
    wy = np.vdot(w, y)
    h0y = np.vdot(h0, y)
    qy = y - h0 * (h0y / h0_nsq)
    yqy = float(np.real(np.vdot(qy, qy)))
    y_nsq = float(np.real(np.vdot(y, y)))
    # snapshots (numerically) parallel to h0 admit no zero-output projection
    # inside the constraint plane; treat them like the exact-parallel case
    if yqy > 1e-15 * y_nsq:
        g1_coef = -np.conj(wy) / yqy
        g1_nsq = (wy.real**2 + wy.imag**2) / yqy
    else:
        g1_coef = 0.0
        g1_nsq = 0.0

    u = h_tilde.conj().T @ w
    u_nsq = float(np.real(np.vdot(u, u)))
    if u_nsq > epsilon:
        fac = math.sqrt(epsilon / u_nsq) - 1.0
        g2_nsq = fac * fac * u_nsq
        v = h_tilde @ (fac * u)
        qv = v - h0 * (np.vdot(h0, v) / h0_nsq)
    else:
        g2_nsq = 0.0
        qv = 0.0

    g = alpha * g1_coef * qy + (1.0 - alpha) * qv
    g_nsq = float(np.real(np.vdot(g, g)))
    if g_nsq > 0.0:
        eta = (alpha * g1_nsq + (1.0 - alpha) * g2_nsq) / g_nsq
        return w + (step * eta) * g
    return w


def ddaa_run(w0: np.ndarray, snapshots: np.ndarray, desired: np.ndarray,
             h0: np.ndarray, h_tilde: np.ndarray, epsilon: float,
             step: float, alpha: float):
    """Drive the dual-domain algorithm across a snapshot block.

    Returns ``(err_sq, w_final, max_constraint_dev)`` where ``err_sq[k]`` is
    the a-priori squared error ``|w_k^H y_k - s_0(k)|^2`` and
    ``max_constraint_dev`` tracks ``|w^H h_0 - 1|`` over every iterate.
    """
    w = np.array(w0, dtype=complex)
    h0 = np.asarray(h0, dtype=complex)
    h0_nsq = float(np.real(np.vdot(h0, h0)))
    total = snapshots.shape[0]
    err_sq = np.empty(total)
    max_dev = abs(np.vdot(w, h0) - 1.0)
    for k in range(total):
        y = snapshots[k]
        e = np.vdot(w, y) - desired[k]
        err_sq[k] = e.real**2 + e.imag**2
        w = ddaa_update(w, y, h0, h0_nsq, h_tilde, epsilon, step, alpha)
        dev = abs(np.vdot(w, h0) - 1.0)
        if dev > max_dev:
            max_dev = dev
    return err_sq, w, float(max_dev)


def cnlms_update(w: np.ndarray, y: np.ndarray, projector: np.ndarray,
                 feasible: np.ndarray, step: float, reg: float) -> np.ndarray:
    """One normalized constrained LMS step; returns the updated weights."""
    wy = np.vdot(w, y)
    y_nsq = float(np.real(np.vdot(y, y)))
    if y_nsq <= 0.0:
        return w
    v = w - (step * np.conj(wy) / (y_nsq + reg)) * y
    return projector @ v + feasible


def cnlms_run(w0: np.ndarray, snapshots: np.ndarray, desired: np.ndarray,
              constraints: np.ndarray, targets: np.ndarray,
              projector: np.ndarray, feasible: np.ndarray,
              step: float, reg: float):
    """Drive the constrained normalized LMS across a snapshot block.

    Returns ``(err_sq, w_final, max_constraint_dev)`` where
    ``max_constraint_dev[m]`` tracks ``|w^H a_m - b_m|`` for constraint m
    over every iterate.
    """
    w = np.array(w0, dtype=complex)
    total = snapshots.shape[0]
    err_sq = np.empty(total)
    max_dev = np.abs(constraints.conj().T @ w - targets)
    for k in range(total):
        y = snapshots[k]
        e = np.vdot(w, y) - desired[k]
        err_sq[k] = e.real**2 + e.imag**2
        w = cnlms_update(w, y, projector, feasible, step, reg)
        dev = np.abs(constraints.conj().T @ w - targets)
        np.maximum(max_dev, dev, out=max_dev)
    return err_sq, w, max_dev
