"""Pure-numpy reference implementation of the numeric kernels.

Every function here has a twin in the compiled module ``_fastcore``; the
active implementation is chosen in ``fisherflow.backend``.  All kernels take
contiguous float64 arrays, perform no validation, and are deterministic.

Array conventions: a joint vector of length nv*nh is flat row-major in the
visible index, i.e. entry (v, h) sits at v*nh + h.
"""

from __future__ import annotations

import numpy as np


def fisher_inner(p, a, b):
    """Sum of a(x) b(x) / p(x)."""
    return float(np.sum(a * b / p))


def kl_div(q, p):
    """Sum of q(x) ln(q(x)/p(x))."""
    return float(np.sum(q * np.log(q / p)))


def xlogx_sum(p):
    """Sum of p(x) ln p(x)."""
    return float(np.sum(p * np.log(p)))


def row_sums(a, nv, nh):
    """Visible marginal of a flat joint vector: out[v] = sum_h a[v, h]."""
    return np.asarray(a).reshape(nv, nh).sum(axis=1)


def conditional_rows(p, nv, nh):
    """Row-stochastic table out[v, h] = p[v, h] / sum_h p[v, h]."""
    m = np.asarray(p).reshape(nv, nh)
    return m / m.sum(axis=1, keepdims=True)


def horizontal_lift(cond, c):
    """Flat joint vector out[v, h] = cond[v, h] * c[v]."""
    return (np.asarray(cond) * np.asarray(c)[:, None]).ravel()


def elbo_sum(q, p, nv, nh):
    """-sum_{v,h} q(v,h) (ln q(v,h) - ln q_V(v) - ln p(v,h))."""
    qm = np.asarray(q).reshape(nv, nh)
    qv = qm.sum(axis=1)
    pm = np.asarray(p).reshape(nv, nh)
    return -float(np.sum(qm * (np.log(qm) - np.log(qv)[:, None] - np.log(pm))))


def ambient_descent(p0, pstar, q, step, iters, reproject):
    """Explicit-Euler natural-gradient descent on the joint simplex.

    State update p <- p - step * g with g = p - q (fixed recognition
    distribution) or g = p - proj(p) where proj(p)(v,h) = pstar[v] p(h|v)
    (reprojection every step).  A visible reference flow
    ref <- ref - step * (ref - pstar), started at the marginal of p0, runs
    alongside.

    Per-iteration logs describe the state AFTER that iteration's update:
    visible KL to pstar, expected ELBO, Fisher norm of g, Fisher norm of
    the pushforward mismatch row_sums(g) - (p_V - pstar), and the max-norm
    deviation of p_V from the reference flow.

    Returns (bad_iter, p, ref, kl, elbo, gnorm, igap, mdev) where bad_iter
    is the 1-based iteration at which positivity failed (-1 if none; the
    log arrays are only valid up to bad_iter - 1).
    """
    p = np.array(p0, dtype=np.float64)
    pstar = np.asarray(pstar, dtype=np.float64)
    nv = pstar.shape[0]
    nh = p.shape[0] // nv
    ref = row_sums(p, nv, nh)

    kl = np.zeros(iters)
    elbo = np.zeros(iters)
    gnorm = np.zeros(iters)
    igap = np.zeros(iters)
    mdev = np.zeros(iters)

    if not reproject:
        q = np.asarray(q, dtype=np.float64)
        qv = row_sums(q, nv, nh)
        # elbo(p) = C2 + sum_x q(x) ln p(x), with the p-independent part
        # C2 = -sum q ln(q / q_V) evaluated once.
        c2 = -float(np.sum(q * (np.log(q) - np.repeat(np.log(qv), nh))))

    def grad(pcur):
        if reproject:
            pv = row_sums(pcur, nv, nh)
            proj = (pstar / pv).repeat(nh) * pcur
            return pcur - proj
        return pcur - q

    g = grad(p)
    bad_iter = -1
    for t in range(iters):
        pnew = p - step * g
        if np.any(pnew <= 0.0):
            bad_iter = t + 1
            break
        p = pnew
        ref = ref - step * (ref - pstar)
        g = grad(p)
        pv = row_sums(p, nv, nh)
        kl[t] = float(np.sum(pstar * np.log(pstar / pv)))
        if reproject:
            elbo[t] = float(np.sum(pstar * np.log(pv)))
        else:
            elbo[t] = c2 + float(np.sum(q * np.log(p)))
        gnorm[t] = np.sqrt(fisher_inner(p, g, g))
        r = row_sums(g, nv, nh) - (pv - pstar)
        igap[t] = np.sqrt(fisher_inner(pv, r, r))
        mdev[t] = float(np.max(np.abs(pv - ref)))

    return bad_iter, p, ref, kl, elbo, gnorm, igap, mdev
