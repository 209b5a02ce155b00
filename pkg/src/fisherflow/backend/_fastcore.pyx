# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the reference kernels in ``_ref``.

Same contracts, argument orders, and return shapes as the numpy versions;
the descent loop avoids per-iteration Python overhead, which is where the
interpreter spends most of its time on long small-state trajectories.
Summation order is in-index order, so results may differ from numpy's
pairwise sums in the last few ulps.
"""

import numpy as np

from libc.math cimport fabs, log, sqrt


def fisher_inner(a_p, a_a, a_b):
    """Sum of a(x) b(x) / p(x)."""
    cdef const double[::1] p = np.ascontiguousarray(a_p, dtype=np.float64)
    cdef const double[::1] a = np.ascontiguousarray(a_a, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(a_b, dtype=np.float64)
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += a[i] * b[i] / p[i]
    return acc


def kl_div(a_q, a_p):
    """Sum of q(x) ln(q(x)/p(x))."""
    cdef const double[::1] q = np.ascontiguousarray(a_q, dtype=np.float64)
    cdef const double[::1] p = np.ascontiguousarray(a_p, dtype=np.float64)
    cdef Py_ssize_t i, n = q.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += q[i] * log(q[i] / p[i])
    return acc


def xlogx_sum(a_p):
    """Sum of p(x) ln p(x)."""
    cdef const double[::1] p = np.ascontiguousarray(a_p, dtype=np.float64)
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += p[i] * log(p[i])
    return acc


def row_sums(a_a, Py_ssize_t nv, Py_ssize_t nh):
    """Visible marginal of a flat joint vector: out[v] = sum_h a[v, h]."""
    cdef const double[::1] a = np.ascontiguousarray(a_a, dtype=np.float64)
    out_arr = np.empty(nv)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t v, h
    cdef double acc
    for v in range(nv):
        acc = 0.0
        for h in range(nh):
            acc += a[v * nh + h]
        out[v] = acc
    return out_arr


def conditional_rows(a_p, Py_ssize_t nv, Py_ssize_t nh):
    """Row-stochastic table out[v, h] = p[v, h] / sum_h p[v, h]."""
    cdef const double[::1] p = np.ascontiguousarray(a_p, dtype=np.float64)
    out_arr = np.empty((nv, nh))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t v, h
    cdef double acc
    for v in range(nv):
        acc = 0.0
        for h in range(nh):
            acc += p[v * nh + h]
        for h in range(nh):
            out[v, h] = p[v * nh + h] / acc
    return out_arr


def horizontal_lift(a_cond, a_c):
    """Flat joint vector out[v, h] = cond[v, h] * c[v]."""
    cdef const double[:, ::1] cond = np.ascontiguousarray(a_cond, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(a_c, dtype=np.float64)
    cdef Py_ssize_t v, h, nv = cond.shape[0], nh = cond.shape[1]
    out_arr = np.empty(nv * nh)
    cdef double[::1] out = out_arr
    for v in range(nv):
        for h in range(nh):
            out[v * nh + h] = cond[v, h] * c[v]
    return out_arr


def elbo_sum(a_q, a_p, Py_ssize_t nv, Py_ssize_t nh):
    """-sum_{v,h} q(v,h) (ln q(v,h) - ln q_V(v) - ln p(v,h))."""
    cdef const double[::1] q = np.ascontiguousarray(a_q, dtype=np.float64)
    cdef const double[::1] p = np.ascontiguousarray(a_p, dtype=np.float64)
    cdef Py_ssize_t v, h, k
    cdef double qv, acc = 0.0
    for v in range(nv):
        qv = 0.0
        for h in range(nh):
            qv += q[v * nh + h]
        for h in range(nh):
            k = v * nh + h
            acc += q[k] * (log(q[k]) - log(qv) - log(p[k]))
    return -acc


def ambient_descent(a_p0, a_pstar, a_q, double step, Py_ssize_t iters,
                    bint reproject):
    """Explicit-Euler descent loop; see ``_ref.ambient_descent``."""
    p_arr = np.array(a_p0, dtype=np.float64)
    cdef double[::1] p = p_arr
    cdef const double[::1] pstar = np.ascontiguousarray(a_pstar, dtype=np.float64)
    cdef Py_ssize_t nv = pstar.shape[0]
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t nh = n // nv

    cdef double c2 = 0.0
    cdef Py_ssize_t v, h, i, k
    cdef double acc
    if reproject:
        q_arr = np.empty(0)
    else:
        q_arr = np.ascontiguousarray(a_q, dtype=np.float64)
    cdef const double[::1] q = q_arr
    if not reproject:
        for v in range(nv):
            acc = 0.0
            for h in range(nh):
                acc += q[v * nh + h]
            for h in range(nh):
                k = v * nh + h
                c2 -= q[k] * (log(q[k]) - log(acc))

    ref_arr = np.empty(nv)
    cdef double[::1] ref = ref_arr
    for v in range(nv):
        acc = 0.0
        for h in range(nh):
            acc += p[v * nh + h]
        ref[v] = acc

    kl_arr = np.zeros(iters)
    elbo_arr = np.zeros(iters)
    gnorm_arr = np.zeros(iters)
    igap_arr = np.zeros(iters)
    mdev_arr = np.zeros(iters)
    cdef double[::1] kl = kl_arr
    cdef double[::1] elbo = elbo_arr
    cdef double[::1] gnorm = gnorm_arr
    cdef double[::1] igap = igap_arr
    cdef double[::1] mdev = mdev_arr

    cdef double[::1] g = np.empty(n)
    cdef double[::1] pnew = np.empty(n)
    cdef double[::1] pv = np.empty(nv)

    cdef double r, dev
    cdef Py_ssize_t t
    cdef Py_ssize_t bad_iter = -1
    cdef bint bad

    # Gradient at the current state (reused as the next step direction).
    _gradient(p, pstar, q, pv, g, nv, nh, reproject)
    for t in range(iters):
        bad = False
        for i in range(n):
            pnew[i] = p[i] - step * g[i]
            if pnew[i] <= 0.0:
                bad = True
        if bad:
            bad_iter = t + 1
            break
        for i in range(n):
            p[i] = pnew[i]
        for v in range(nv):
            ref[v] = ref[v] - step * (ref[v] - pstar[v])
        _gradient(p, pstar, q, pv, g, nv, nh, reproject)

        acc = 0.0
        for v in range(nv):
            acc += pstar[v] * log(pstar[v] / pv[v])
        kl[t] = acc

        if reproject:
            acc = 0.0
            for v in range(nv):
                acc += pstar[v] * log(pv[v])
            elbo[t] = acc
        else:
            acc = 0.0
            for i in range(n):
                acc += q[i] * log(p[i])
            elbo[t] = c2 + acc

        acc = 0.0
        for i in range(n):
            acc += g[i] * g[i] / p[i]
        gnorm[t] = sqrt(acc)

        acc = 0.0
        for v in range(nv):
            r = 0.0
            for h in range(nh):
                r += g[v * nh + h]
            r -= pv[v] - pstar[v]
            acc += r * r / pv[v]
        igap[t] = sqrt(acc)

        dev = 0.0
        for v in range(nv):
            r = fabs(pv[v] - ref[v])
            if r > dev:
                dev = r
        mdev[t] = dev

    return (bad_iter, p_arr, ref_arr, kl_arr, elbo_arr, gnorm_arr,
            igap_arr, mdev_arr)


cdef void _gradient(double[::1] p, const double[::1] pstar,
                    const double[::1] q, double[::1] pv, double[::1] g,
                    Py_ssize_t nv, Py_ssize_t nh, bint reproject):
    """g = p - q, or p - proj(p) with proj(p)(v,h) = pstar[v] p(h|v).

    Also refreshes pv with the row sums of p.
    """
    cdef Py_ssize_t v, h, k
    cdef double acc, scale
    for v in range(nv):
        acc = 0.0
        for h in range(nh):
            acc += p[v * nh + h]
        pv[v] = acc
    if reproject:
        for v in range(nv):
            scale = pstar[v] / pv[v]
            for h in range(nh):
                k = v * nh + h
                g[k] = p[k] - scale * p[k]
    else:
        for k in range(nv * nh):
            g[k] = p[k] - q[k]
