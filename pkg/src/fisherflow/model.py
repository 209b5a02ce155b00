"""Parametric models inside the simplex: Fisher matrices, tangent-space
projection, natural gradients in parameter coordinates, cylindricity, and
pushforward gradient invariance.

A model is a smooth map theta |-> p(theta) into the open simplex together
with its Jacobian.  All metric computations scale coordinates by 1/sqrt(p)
so that the Fisher-Rao inner product becomes Euclidean; rank decisions are
then ordinary singular-value thresholding.

Numerical policy
----------------
* Jacobian rank is judged with a relative threshold (``RANK_TOL`` times the
  largest singular value); falling below it raises SingularPoint.
* Fisher solves use a Cholesky factorization.  When the eigenvalue ratio
  drops below ``EIG_RATIO_TOL`` the solve falls back to an
  eigenvalue-clipped pseudo-solve and emits NearSingularFisherWarning.
* Subspace-intersection ranks use singular values of cross projections of
  orthonormal bases.  Those are cosines of principal angles, so they live
  in [0, 1] and are compared against the threshold directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DimensionMismatch,
    NearSingularFisherWarning,
    RangeMismatch,
    SingularPoint,
)
from .fibration import JointSpace, marginalize_v
from .simplex import Distribution, StateSpace, TangentVector

# Relative singular-value threshold for rank decisions on Jacobians.
RANK_TOL = 1e-8
# Eigenvalue-ratio threshold below which Fisher solves switch to the
# clipped pseudo-solve.
EIG_RATIO_TOL = 1e-12
# Maximum allowed marginal mismatch between a joint model and the visible
# model paired with it.
MARGINAL_MATCH_TOL = 1e-10

GAP_MODES = ("pullback", "dist_to_q", "fixed_q")


@dataclass(frozen=True, eq=False)
class ParametricModel:
    """Smooth d-parameter family of strictly positive distributions.

    ``eval`` maps a parameter vector to a Distribution; ``jacobian`` maps it
    to the list of d coordinate tangent vectors based at eval(theta).  Both
    must be pure functions, so model objects can be shared freely.
    """

    dim: int
    space: StateSpace
    eval: Callable[[np.ndarray], Distribution]
    jacobian: Callable[[np.ndarray], list[TangentVector]]
    joint_space: JointSpace | None = None
    name: str = ""


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    """Gram matrix of the Jacobian columns in the Fisher-Rao metric."""

    entries: np.ndarray
    condition: float
    theta: np.ndarray

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return fisher_solve(self.entries, rhs)


@dataclass(frozen=True)
class CylindricityReport:
    """Dimensions of a model tangent space against the H/V splitting."""

    dim_tangent: int
    dim_h_intersection: int
    dim_v_intersection: int
    is_cylindrical: bool
    residual: float


def _theta_vector(m: ParametricModel, theta) -> np.ndarray:
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    if theta.shape != (m.dim,):
        raise DimensionMismatch(
            f"model '{m.name}' expects {m.dim} parameters, got shape {theta.shape}"
        )
    return theta


def jacobian_matrix(m: ParametricModel, theta) -> np.ndarray:
    """Jacobian columns stacked into a (space.size, dim) array."""
    cols = m.jacobian(_theta_vector(m, theta))
    if len(cols) != m.dim:
        raise DimensionMismatch(
            f"model '{m.name}' returned {len(cols)} Jacobian columns, expected {m.dim}"
        )
    return np.column_stack([c.coords for c in cols])


def fisher_solve(entries: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve G u = rhs for a symmetric PSD Fisher matrix G.

    Healthy matrices go through a Cholesky factorization.  When the
    smallest eigenvalue sits below EIG_RATIO_TOL times the largest the
    matrix is treated as effectively singular: eigenvalues under the
    threshold are dropped and the pseudo-solve is returned, with a
    NearSingularFisherWarning (such points are singular points of the
    model and the result is only a least-squares direction).
    """
    entries = np.asarray(entries, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    w = np.linalg.eigvalsh(entries)
    w_max = float(w[-1])
    if w_max <= 0.0 or float(w[0]) < EIG_RATIO_TOL * w_max:
        warnings.warn(
            NearSingularFisherWarning(
                f"Fisher matrix nearly singular (eigenvalues in "
                f"[{float(w[0]):.3e}, {w_max:.3e}]); using clipped pseudo-solve"
            ),
            stacklevel=2,
        )
        vals, vecs = np.linalg.eigh(entries)
        inv = np.zeros_like(vals)
        keep = vals > EIG_RATIO_TOL * max(w_max, 0.0)
        inv[keep] = 1.0 / vals[keep]
        return vecs @ (inv * (vecs.T @ rhs))
    factor = cho_factor(entries, lower=True, check_finite=False)
    return cho_solve(factor, rhs, check_finite=False)


def fisher_matrix(m: ParametricModel, theta) -> FisherMatrix:
    """Fisher information matrix G_ij = g_p(dp/dtheta_i, dp/dtheta_j)."""
    theta = _theta_vector(m, theta)
    p = m.eval(theta)
    jac = jacobian_matrix(m, theta)
    scaled = jac / np.sqrt(p.probs)[:, None]
    sv = np.linalg.svd(scaled, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] < RANK_TOL * sv[0]:
        raise SingularPoint(
            f"Jacobian of model '{m.name}' is rank-deficient "
            f"(singular values span [{float(sv[-1]):.3e}, {float(sv[0]):.3e}])",
            singular_value=float(sv[-1]),
        )
    entries = scaled.T @ scaled
    entries = 0.5 * (entries + entries.T)
    entries.flags.writeable = False
    return FisherMatrix(
        entries=entries, condition=float((sv[0] / sv[-1]) ** 2), theta=theta
    )


def project_onto_tangent(
    m: ParametricModel, theta, vec: TangentVector
) -> tuple[np.ndarray, TangentVector]:
    """Fisher-orthogonal projection of an ambient tangent vector onto T_pM.

    Returns the coefficient vector c solving G c = b with
    b_i = g_p(dp/dtheta_i, vec), and the projected vector sum_i c_i dp_i.
    The residual vec - projected is Fisher-orthogonal to every column.
    """
    theta = _theta_vector(m, theta)
    p = m.eval(theta)
    if vec.space.size != m.space.size:
        raise DimensionMismatch("tangent vector lives on the wrong state space")
    jac = jacobian_matrix(m, theta)
    fm = fisher_matrix(m, theta)
    rhs = jac.T @ (vec.coords / p.probs)
    coeffs = fisher_solve(fm.entries, rhs)
    projected = TangentVector(m.space, jac @ coeffs, base=p)
    return coeffs, projected


def natural_param_gradient(
    m: ParametricModel, theta, euclidean_param_grad
) -> np.ndarray:
    """Natural gradient in parameter space: the solution of G u = grad.

    Pushing u forward through the Jacobian gives the Fisher-Rao gradient of
    the objective restricted to the model, i.e. the tangent projection of
    the ambient gradient whenever the objective extends to the simplex.
    """
    grad = np.asarray(euclidean_param_grad, dtype=np.float64)
    if grad.shape != (m.dim,):
        raise DimensionMismatch(
            f"gradient has shape {grad.shape}, expected ({m.dim},)"
        )
    fm = fisher_matrix(m, theta)
    return fisher_solve(fm.entries, grad)


def _rank_from_singulars(sv: np.ndarray, tol: float) -> tuple[int, float]:
    """Rank at an absolute threshold, plus the smallest retained value."""
    kept = sv[sv > tol]
    rank = int(kept.size)
    edge = float(kept[-1]) if rank else 0.0
    return rank, edge


def cylindricity_check(
    m: ParametricModel, theta, rank_tol: float = RANK_TOL
) -> CylindricityReport:
    """Test whether T_pM splits into its horizontal and vertical parts.

    The model tangent space is cylindrical at theta when
    dim(T_pM & H_p) + dim(T_pM & V_p) = dim T_pM.  Intersections are
    computed on a Fisher-orthonormal basis U of T_pM (obtained by SVD in
    1/sqrt(p)-scaled coordinates): the vertical/horizontal parts of U are
    cross-projection matrices whose singular values are principal-angle
    cosines in [0, 1], and dim(T_pM & H_p) = dim T_pM - rank(P_V U).
    ``residual`` records the smallest singular value retained by either
    rank decision (0 when both projections vanish outright).
    """
    if m.joint_space is None:
        raise ValueError(f"model '{m.name}' has no joint space attached")
    js = m.joint_space
    theta = _theta_vector(m, theta)
    p = m.eval(theta)
    jac = jacobian_matrix(m, theta)
    scaled = jac / np.sqrt(p.probs)[:, None]
    u_basis, sv, _ = np.linalg.svd(scaled, full_matrices=False)
    if sv[0] == 0.0 or sv[-1] < rank_tol * sv[0]:
        raise SingularPoint(
            f"Jacobian of model '{m.name}' is rank-deficient at the "
            f"cylindricity test point",
            singular_value=float(sv[-1]),
        )
    dim_tangent = m.dim

    # Per-visible-block unit vectors u_v = sqrt(p(v, .)) / sqrt(p_V(v)):
    # in scaled coordinates the vertical space is, blockwise, the orthogonal
    # complement of u_v, so the block projectors are I - u_v u_v^T.
    sq = np.sqrt(p.probs).reshape(js.nv, js.nh)
    unit = sq / np.linalg.norm(sq, axis=1, keepdims=True)
    blocks = u_basis.reshape(js.nv, js.nh, dim_tangent)
    coef = np.einsum("vh,vhd->vd", unit, blocks)
    horizontal = (unit[:, :, None] * coef[:, None, :]).reshape(-1, dim_tangent)
    vertical = u_basis - horizontal

    sv_vert = np.linalg.svd(vertical, compute_uv=False)
    sv_horiz = np.linalg.svd(horizontal, compute_uv=False)
    rank_vert, edge_vert = _rank_from_singulars(sv_vert, rank_tol)
    rank_horiz, edge_horiz = _rank_from_singulars(sv_horiz, rank_tol)
    dim_h = dim_tangent - rank_vert
    dim_v = dim_tangent - rank_horiz

    edges = [e for e in (edge_vert, edge_horiz) if e > 0.0]
    residual = min(edges) if edges else 0.0
    return CylindricityReport(
        dim_tangent=dim_tangent,
        dim_h_intersection=dim_h,
        dim_v_intersection=dim_v,
        is_cylindrical=(dim_h + dim_v == dim_tangent),
        residual=residual,
    )


def _rank_at(sv: np.ndarray, tol: float) -> int:
    return int(np.count_nonzero(sv > tol))


def pushforward_invariance_gap(
    m_joint: ParametricModel,
    m_visible: ParametricModel,
    theta_joint,
    theta_visible,
    objective_on_visible,
    mode: str = "pullback",
) -> float:
    """Fisher norm of dpi_V(grad on M) - (grad on M_V) at the marginal.

    The joint-side objective is selected by ``mode``:

    * ``"pullback"`` -- the visible objective composed with marginalization;
      ``objective_on_visible`` must be a callable returning its ambient
      Fisher-Rao gradient at a visible Distribution.
    * ``"dist_to_q"`` -- divergence from the data manifold of a visible
      target; ``objective_on_visible`` is that target Distribution.
    * ``"fixed_q"`` -- divergence D(q || .) from a fixed joint q;
      ``objective_on_visible`` is q, and the visible objective is the
      divergence from its marginal.

    Both models must sit over the same fibration: the marginal of the joint
    point must match the visible point within MARGINAL_MATCH_TOL, and
    dpi_V must carry T_pM onto the visible tangent space T M_V (checked by
    rank; RangeMismatch otherwise).
    """
    if mode not in GAP_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {GAP_MODES}")
    if m_joint.joint_space is None:
        raise ValueError(f"joint model '{m_joint.name}' has no joint space")
    js = m_joint.joint_space
    if m_visible.space.size != js.nv:
        raise DimensionMismatch("visible model lives on the wrong space")

    theta_joint = _theta_vector(m_joint, theta_joint)
    theta_visible = _theta_vector(m_visible, theta_visible)
    p = m_joint.eval(theta_joint)
    p_v = marginalize_v(js, p)
    p_v_model = m_visible.eval(theta_visible)
    mismatch = float(np.max(np.abs(p_v.probs - p_v_model.probs)))
    if mismatch > MARGINAL_MATCH_TOL:
        raise ValueError(
            f"visible model is {mismatch:.3e} away from the joint marginal "
            f"(tolerance {MARGINAL_MATCH_TOL})"
        )

    jac_joint = jacobian_matrix(m_joint, theta_joint)
    jac_vis = jacobian_matrix(m_visible, theta_visible)
    # Images of the joint Jacobian columns under dpi_V (blockwise row sums).
    dpi_jac = jac_joint.reshape(js.nv, js.nh, m_joint.dim).sum(axis=1)

    inv_sqrt = 1.0 / np.sqrt(p_v.probs)
    img = dpi_jac * inv_sqrt[:, None]
    vis = jac_vis * inv_sqrt[:, None]
    sv_all = np.linalg.svd(np.hstack([img, vis]), compute_uv=False)
    tol = RANK_TOL * float(sv_all[0])
    r_img = _rank_at(np.linalg.svd(img, compute_uv=False), tol)
    r_vis = _rank_at(np.linalg.svd(vis, compute_uv=False), tol)
    r_all = _rank_at(sv_all, tol)
    if not (r_img == r_vis == r_all):
        raise RangeMismatch(
            f"dpi_V(T_pM) has rank {r_img} against rank {r_vis} for the "
            f"visible model (joint span rank {r_all}); the pushforward "
            f"condition fails"
        )

    # Ambient Fisher-Rao gradient of the visible objective at the marginal.
    if mode == "pullback":
        grad_v = objective_on_visible(p_v)
        grad_v_coords = (
            grad_v.coords if isinstance(grad_v, TangentVector) else np.asarray(grad_v)
        )
        if grad_v_coords.shape != (js.nv,):
            raise DimensionMismatch("visible gradient has the wrong shape")
    elif mode == "dist_to_q":
        pstar = objective_on_visible
        grad_v_coords = p_v.probs - pstar.probs
    else:  # fixed_q
        q = objective_on_visible
        if q.space.size != js.joint.size:
            raise DimensionMismatch("fixed_q mode expects a joint distribution")
        pstar = marginalize_v(js, q)
        grad_v_coords = p_v.probs - pstar.probs

    # Euclidean parameter gradient on the joint side.
    if mode == "pullback":
        param_grad_joint = dpi_jac.T @ (grad_v_coords / p_v.probs)
    elif mode == "dist_to_q":
        cond = p.probs.reshape(js.nv, js.nh) / p_v.probs[:, None]
        projected = (pstar.probs[:, None] * cond).ravel()
        param_grad_joint = jac_joint.T @ ((p.probs - projected) / p.probs)
    else:
        param_grad_joint = jac_joint.T @ ((p.probs - q.probs) / p.probs)

    u = natural_param_gradient(m_joint, theta_joint, param_grad_joint)
    pushed = dpi_jac @ u

    param_grad_vis = jac_vis.T @ (grad_v_coords / p_v.probs)
    w = natural_param_gradient(m_visible, theta_visible, param_grad_vis)
    grad_on_visible = jac_vis @ w

    diff = pushed - grad_on_visible
    return float(np.sqrt(np.sum(diff * diff / p_v.probs)))


# ---------------------------------------------------------------------------
# Built-in model families
# ---------------------------------------------------------------------------


def _softmax_last(theta: np.ndarray) -> np.ndarray:
    """Softmax of (theta_0, ..., theta_{d-1}, 0): log-odds vs the last state."""
    z = np.concatenate([theta, [0.0]])
    z -= z.max()
    e = np.exp(z)
    return e / e.sum()


def _wrap_columns(dist: Distribution, mat: np.ndarray) -> list[TangentVector]:
    return [TangentVector(dist.space, mat[:, i], base=dist) for i in range(mat.shape[1])]


def log_odds(p: Distribution) -> np.ndarray:
    """Chart inverse for the full model: theta_i = ln(p_i / p_last)."""
    logs = np.log(p.probs)
    return logs[:-1] - logs[-1]


def full_simplex_model(
    space: StateSpace, *, joint_space: JointSpace | None = None, name: str = "full"
) -> ParametricModel:
    """The whole open simplex in log-odds coordinates (d = size - 1).

    The chart keeps every iterate strictly positive and has an everywhere
    non-singular Fisher matrix, so the simplex itself participates in the
    parametric machinery like any proper submodel.
    """
    n = space.size
    d = n - 1

    def ev(theta: np.ndarray) -> Distribution:
        theta = np.asarray(theta, dtype=np.float64)
        return Distribution(space, _softmax_last(theta))

    def jac(theta: np.ndarray) -> list[TangentVector]:
        dist = ev(theta)
        p = dist.probs
        mat = p[:, None] * (np.eye(n)[:, :d] - p[None, :d])
        return _wrap_columns(dist, mat)

    return ParametricModel(
        dim=d, space=space, eval=ev, jacobian=jac, joint_space=joint_space, name=name
    )


def product_model(js: JointSpace, *, name: str = "product") -> ParametricModel:
    """Visible marginal and per-visible conditionals with separate parameters.

    p(v, h) = m(v; alpha) k(h | v; beta_v) with alpha the visible log-odds
    (nv - 1 entries) and beta one log-odds row per visible state
    (nv * (nh - 1) entries), theta = [alpha, beta_0, ..., beta_{nv-1}].
    The alpha columns of the Jacobian are horizontal and the beta columns
    vertical, so the model is cylindrical at every point.
    """
    nv, nh = js.nv, js.nh
    d = (nv - 1) + nv * (nh - 1)

    def split(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return theta[: nv - 1], theta[nv - 1 :].reshape(nv, nh - 1)

    def tables(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        alpha, beta = split(np.asarray(theta, dtype=np.float64))
        marg = _softmax_last(alpha)
        cond = np.vstack([_softmax_last(row) for row in beta])
        return marg, cond

    def ev(theta: np.ndarray) -> Distribution:
        marg, cond = tables(theta)
        return Distribution(js.joint, (marg[:, None] * cond).ravel())

    def jac(theta: np.ndarray) -> list[TangentVector]:
        marg, cond = tables(theta)
        flat = (marg[:, None] * cond).ravel()
        dist = Distribution(js.joint, flat)
        cols = np.empty((nv * nh, d))
        ind_v = np.repeat(np.eye(nv)[:, : nv - 1], nh, axis=0)
        cols[:, : nv - 1] = flat[:, None] * (ind_v - marg[None, : nv - 1])
        k = nv - 1
        for v in range(nv):
            block = np.zeros((nv * nh, nh - 1))
            rows = slice(v * nh, (v + 1) * nh)
            block[rows] = flat[rows, None] * (
                np.eye(nh)[:, : nh - 1] - cond[v, None, : nh - 1]
            )
            cols[:, k : k + nh - 1] = block
            k += nh - 1
        return _wrap_columns(dist, cols)

    return ParametricModel(
        dim=d, space=js.joint, eval=ev, jacobian=jac, joint_space=js, name=name
    )


def product_log_odds(js: JointSpace, p: Distribution) -> np.ndarray:
    """Chart inverse for the product model at a strictly positive joint p."""
    if p.space.size != js.joint.size:
        raise DimensionMismatch("expected a joint-space distribution")
    table = p.probs.reshape(js.nv, js.nh)
    marg = table.sum(axis=1)
    cond = table / marg[:, None]
    alpha = np.log(marg[:-1]) - np.log(marg[-1])
    beta = np.log(cond[:, :-1]) - np.log(cond[:, -1:])
    return np.concatenate([alpha, beta.ravel()])


def independence_model(js: JointSpace, *, name: str = "independence") -> ParametricModel:
    """Product of independent visible and hidden factors: p(v,h) = m(v) k(h).

    A proper cylindrical submodel (d = nv + nh - 2): the marginal columns
    are horizontal and the shared-conditional columns vertical, but the
    tangent space no longer fills the whole fiber product, so tangent
    projections are non-trivial.
    """
    nv, nh = js.nv, js.nh
    d = (nv - 1) + (nh - 1)

    def tables(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        theta = np.asarray(theta, dtype=np.float64)
        return _softmax_last(theta[: nv - 1]), _softmax_last(theta[nv - 1 :])

    def ev(theta: np.ndarray) -> Distribution:
        marg, hid = tables(theta)
        return Distribution(js.joint, np.outer(marg, hid).ravel())

    def jac(theta: np.ndarray) -> list[TangentVector]:
        marg, hid = tables(theta)
        flat = np.outer(marg, hid).ravel()
        dist = Distribution(js.joint, flat)
        ind_v = np.repeat(np.eye(nv)[:, : nv - 1], nh, axis=0)
        ind_h = np.tile(np.eye(nh)[:, : nh - 1], (nv, 1))
        cols = np.hstack(
            [
                flat[:, None] * (ind_v - marg[None, : nv - 1]),
                flat[:, None] * (ind_h - hid[None, : nh - 1]),
            ]
        )
        return _wrap_columns(dist, cols)

    return ParametricModel(
        dim=d, space=js.joint, eval=ev, jacobian=jac, joint_space=js, name=name
    )


def tied_model(
    js: JointSpace, a: Sequence[float], b, *, name: str = "tied"
) -> ParametricModel:
    """One-parameter curve whose marginal and conditionals share theta.

    p(v, h; theta) = m(v; theta) k(h | v; theta) with
    m = softmax(theta * a) over visible states and row v of k the softmax
    of theta * b[v].  For non-constant a and b rows the single tangent
    direction has both a horizontal and a vertical component, so the curve
    is nowhere cylindrical and pushforward gradient invariance fails.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.shape != (js.nv,) or b.shape != (js.nv, js.nh):
        raise DimensionMismatch(
            f"direction shapes {a.shape}, {b.shape} do not match the joint space"
        )

    def tables(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = float(np.asarray(theta, dtype=np.float64)[0])
        zm = t * a - np.max(t * a)
        marg = np.exp(zm)
        marg /= marg.sum()
        zk = t * b - np.max(t * b, axis=1, keepdims=True)
        cond = np.exp(zk)
        cond /= cond.sum(axis=1, keepdims=True)
        return marg, cond

    def ev(theta: np.ndarray) -> Distribution:
        marg, cond = tables(theta)
        return Distribution(js.joint, (marg[:, None] * cond).ravel())

    def jac(theta: np.ndarray) -> list[TangentVector]:
        marg, cond = tables(theta)
        flat = (marg[:, None] * cond).ravel()
        dist = Distribution(js.joint, flat)
        a_centered = a - float(marg @ a)
        b_centered = b - np.sum(cond * b, axis=1, keepdims=True)
        col = flat * (a_centered[:, None] + b_centered).ravel()
        return _wrap_columns(dist, col[:, None])

    return ParametricModel(
        dim=1, space=js.joint, eval=ev, jacobian=jac, joint_space=js, name=name
    )


def tied_visible_model(
    space: StateSpace, a: Sequence[float], *, name: str = "tied-visible"
) -> ParametricModel:
    """The visible factor of a tied model: m(v; theta) = softmax(theta * a)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.shape != (space.size,):
        raise DimensionMismatch("direction length does not match the space")

    def ev(theta: np.ndarray) -> Distribution:
        t = float(np.asarray(theta, dtype=np.float64)[0])
        z = t * a - np.max(t * a)
        marg = np.exp(z)
        return Distribution(space, marg / marg.sum())

    def jac(theta: np.ndarray) -> list[TangentVector]:
        dist = ev(theta)
        col = dist.probs * (a - float(dist.probs @ a))
        return _wrap_columns(dist, col[:, None])

    return ParametricModel(dim=1, space=space, eval=ev, jacobian=jac, name=name)


def random_tied_pair(
    js: JointSpace, rng: np.random.Generator
) -> tuple[ParametricModel, ParametricModel]:
    """Tied joint curve plus its visible factor, with random directions.

    Directions are standard normal, so both factors are almost surely
    genuinely theta-dependent and the curve is non-cylindrical.
    """
    a = rng.standard_normal(js.nv)
    b = rng.standard_normal((js.nv, js.nh))
    return tied_model(js, a, b), tied_visible_model(js.visible, a)
