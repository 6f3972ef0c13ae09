# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the online algorithms.

Behavior matches ``rzfbeam._kernels.fallback`` (same update order, same
degenerate-snapshot guards); only the per-iteration loop is hand-written.
"""

import numpy as np

from libc.math cimport sqrt

ctypedef double complex cplx


cdef inline double _abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


def ddaa_run(cplx[::1] w0, cplx[:, ::1] snapshots, cplx[::1] desired,
             cplx[::1] h0, cplx[:, ::1] h_tilde,
             double epsilon, double step, double alpha):
    """See ``fallback.ddaa_run``; snapshots are (n_iterations, n_sensors)."""
    cdef Py_ssize_t total = snapshots.shape[0]
    cdef Py_ssize_t n = snapshots.shape[1]
    cdef Py_ssize_t n_dual = h_tilde.shape[1]

    w_arr = np.array(w0, dtype=np.complex128, copy=True)
    err_arr = np.empty(total, dtype=np.float64)
    qy_arr = np.empty(n, dtype=np.complex128)
    qv_arr = np.empty(n, dtype=np.complex128)
    g_arr = np.empty(n, dtype=np.complex128)
    u_arr = np.empty(n_dual, dtype=np.complex128)

    cdef cplx[::1] w = w_arr
    cdef double[::1] err_sq = err_arr
    cdef cplx[::1] qy = qy_arr
    cdef cplx[::1] qv = qv_arr
    cdef cplx[::1] g = g_arr
    cdef cplx[::1] u = u_arr

    cdef double h0_nsq = 0.0
    cdef Py_ssize_t i, j, k
    for i in range(n):
        h0_nsq += _abs2(h0[i])

    cdef cplx wy, h0y, e, coef, g1_coef, h0v, wh0
    cdef double yqy, y_nsq, g1_nsq, u_nsq, fac, g2_nsq, g_nsq, eta, dev, max_dev
    cdef double scale
    cdef bint have_qv

    wh0 = 0.0
    for i in range(n):
        wh0 += w[i].conjugate() * h0[i]
    max_dev = sqrt(_abs2(wh0 - 1.0))

    for k in range(total):
        wy = 0.0
        h0y = 0.0
        for i in range(n):
            wy += w[i].conjugate() * snapshots[k, i]
            h0y += h0[i].conjugate() * snapshots[k, i]
        e = wy - desired[k]
        err_sq[k] = _abs2(e)

        coef = h0y / h0_nsq
        yqy = 0.0
        y_nsq = 0.0
        for i in range(n):
            qy[i] = snapshots[k, i] - h0[i] * coef
            yqy += _abs2(qy[i])
            y_nsq += _abs2(snapshots[k, i])
        # snapshots (numerically) parallel to h0 admit no zero-output
        # projection inside the constraint plane; skip that displacement
        if yqy > 1e-15 * y_nsq:
            g1_coef = -wy.conjugate() / yqy
            g1_nsq = _abs2(wy) / yqy
        else:
            g1_coef = 0.0
            g1_nsq = 0.0

        for j in range(n_dual):
            u[j] = 0.0
        for i in range(n):
            for j in range(n_dual):
                u[j] += h_tilde[i, j].conjugate() * w[i]
        u_nsq = 0.0
        for j in range(n_dual):
            u_nsq += _abs2(u[j])

        have_qv = u_nsq > epsilon
        if have_qv:
            fac = sqrt(epsilon / u_nsq) - 1.0
            g2_nsq = fac * fac * u_nsq
            for j in range(n_dual):
                u[j] = u[j] * fac
            h0v = 0.0
            for i in range(n):
                qv[i] = 0.0
                for j in range(n_dual):
                    qv[i] += h_tilde[i, j] * u[j]
                h0v += h0[i].conjugate() * qv[i]
            coef = h0v / h0_nsq
            for i in range(n):
                qv[i] -= h0[i] * coef
        else:
            g2_nsq = 0.0

        g_nsq = 0.0
        for i in range(n):
            g[i] = alpha * g1_coef * qy[i]
            if have_qv:
                g[i] += (1.0 - alpha) * qv[i]
            g_nsq += _abs2(g[i])
        if g_nsq > 0.0:
            eta = (alpha * g1_nsq + (1.0 - alpha) * g2_nsq) / g_nsq
            scale = step * eta
            for i in range(n):
                w[i] += scale * g[i]

        wh0 = 0.0
        for i in range(n):
            wh0 += w[i].conjugate() * h0[i]
        dev = sqrt(_abs2(wh0 - 1.0))
        if dev > max_dev:
            max_dev = dev

    return err_arr, w_arr, max_dev


def cnlms_run(cplx[::1] w0, cplx[:, ::1] snapshots, cplx[::1] desired,
              cplx[:, ::1] constraints, cplx[::1] targets,
              cplx[:, ::1] projector, cplx[::1] feasible,
              double step, double reg):
    """See ``fallback.cnlms_run``; snapshots are (n_iterations, n_sensors)."""
    cdef Py_ssize_t total = snapshots.shape[0]
    cdef Py_ssize_t n = snapshots.shape[1]
    cdef Py_ssize_t m_dim = constraints.shape[1]

    w_arr = np.array(w0, dtype=np.complex128, copy=True)
    err_arr = np.empty(total, dtype=np.float64)
    v_arr = np.empty(n, dtype=np.complex128)
    acc_arr = np.empty(m_dim, dtype=np.complex128)
    dev_arr = np.zeros(m_dim, dtype=np.float64)

    cdef cplx[::1] w = w_arr
    cdef double[::1] err_sq = err_arr
    cdef cplx[::1] v = v_arr
    cdef cplx[::1] acc = acc_arr
    cdef double[::1] max_dev = dev_arr

    cdef Py_ssize_t i, j, k, m
    cdef cplx wy, e, gcoef, s
    cdef double y_nsq, dev

    for m in range(m_dim):
        acc[m] = 0.0
    for i in range(n):
        for m in range(m_dim):
            acc[m] += w[i].conjugate() * constraints[i, m]
    for m in range(m_dim):
        max_dev[m] = sqrt(_abs2(acc[m] - targets[m]))

    for k in range(total):
        wy = 0.0
        y_nsq = 0.0
        for i in range(n):
            wy += w[i].conjugate() * snapshots[k, i]
            y_nsq += _abs2(snapshots[k, i])
        e = wy - desired[k]
        err_sq[k] = _abs2(e)

        if y_nsq > 0.0:
            gcoef = step * wy.conjugate() / (y_nsq + reg)
            for i in range(n):
                v[i] = w[i] - gcoef * snapshots[k, i]
            for i in range(n):
                s = feasible[i]
                for j in range(n):
                    s += projector[i, j] * v[j]
                w[i] = s

        for m in range(m_dim):
            acc[m] = 0.0
        for i in range(n):
            for m in range(m_dim):
                acc[m] += w[i].conjugate() * constraints[i, m]
        for m in range(m_dim):
            dev = sqrt(_abs2(acc[m] - targets[m]))
            if dev > max_dev[m]:
                max_dev[m] = dev

    return err_arr, w_arr, dev_arr
