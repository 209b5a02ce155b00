"""Learning objectives on the visible and joint simplices, with their
Fisher-Rao gradients.

All divergences are in nats.  The context bundles the joint space, the
visible target pstar, and optionally a fixed recognition distribution q
whose marginal must equal pstar (membership in the data manifold).

Value / gradient pairs implemented here:

    kl_visible(p_V)    = D(pstar || p_V)            grad: p_V - pstar
    cross_entropy(p_V) = -sum pstar ln p_V          grad: p_V - pstar
    dist_to_Q(p)       = D(pstar || marginal(p))    grad: p - proj(p)
    dq_objective(p)    = D(q || p)                  grad: p - q
    elbo_expected(p)   = -sum q ln(q(h|v)/p(v,h))   grad: q - p

The expected ELBO and -D(q || .) differ by the p-independent constant
sum_v pstar ln pstar, so their gradient fields are negatives of each other;
`target_log_mass` exposes that constant for bit-level identity checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend as K
from .errors import DimensionMismatch, MissingRecognition
from .fibration import (
    JointSpace,
    marginalize_v,
    nat_grad_dist_to_Q,
    project_to_data_manifold,
)
from .simplex import Distribution, TangentVector, kl_divergence

# A stored recognition distribution must sit on the data manifold of pstar
# to this max-norm tolerance.
Q_MARGINAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ObjectiveContext:
    """Joint space, visible target, and optional recognition distribution."""

    js: JointSpace
    pstar: Distribution
    q: Distribution | None = None

    def __post_init__(self):
        if self.pstar.space.size != self.js.nv:
            raise DimensionMismatch("target lives on the wrong visible space")
        if self.q is not None:
            if self.q.space.size != self.js.joint.size:
                raise DimensionMismatch("recognition distribution is not joint")
            qv = marginalize_v(self.js, self.q)
            gap = float(np.max(np.abs(qv.probs - self.pstar.probs)))
            if gap > Q_MARGINAL_TOL:
                raise ValueError(
                    f"recognition marginal is {gap:.3e} from the target "
                    f"(tolerance {Q_MARGINAL_TOL})"
                )

    def require_q(self) -> Distribution:
        if self.q is None:
            raise MissingRecognition("context has no recognition distribution")
        return self.q


def _check_visible(ctx: ObjectiveContext, p_v: Distribution) -> None:
    if p_v.space.size != ctx.js.nv:
        raise DimensionMismatch("expected a visible-space distribution")


def _check_joint(ctx: ObjectiveContext, p: Distribution) -> None:
    if p.space.size != ctx.js.joint.size:
        raise DimensionMismatch("expected a joint-space distribution")


def target_log_mass(ctx: ObjectiveContext) -> float:
    """The constant sum_v pstar(v) ln pstar(v) (negative target entropy)."""
    return K.xlogx_sum(ctx.pstar.probs)


def kl_visible(ctx: ObjectiveContext, p_v: Distribution) -> float:
    """D(pstar || p_V) on the visible simplex."""
    _check_visible(ctx, p_v)
    return kl_divergence(ctx.pstar, p_v)


def kl_visible_grad(ctx: ObjectiveContext, p_v: Distribution) -> TangentVector:
    _check_visible(ctx, p_v)
    return TangentVector(p_v.space, p_v.probs - ctx.pstar.probs, base=p_v)


def cross_entropy(ctx: ObjectiveContext, p_v: Distribution) -> float:
    """-sum_v pstar(v) ln p_V(v); kl_visible plus the constant entropy."""
    _check_visible(ctx, p_v)
    return -float(np.dot(ctx.pstar.probs, np.log(p_v.probs)))


def cross_entropy_grad(ctx: ObjectiveContext, p_v: Distribution) -> TangentVector:
    return kl_visible_grad(ctx, p_v)


def dist_to_Q(ctx: ObjectiveContext, p: Distribution) -> float:
    """Divergence from the data manifold, evaluated as D(pstar || marginal)."""
    _check_joint(ctx, p)
    return kl_divergence(ctx.pstar, marginalize_v(ctx.js, p))


def dist_to_Q_via_projection(ctx: ObjectiveContext, p: Distribution) -> float:
    """Second route: D(proj(p) || p).  Agrees with dist_to_Q to roundoff."""
    _check_joint(ctx, p)
    return kl_divergence(project_to_data_manifold(ctx.js, p, ctx.pstar), p)


def dist_to_Q_grad(ctx: ObjectiveContext, p: Distribution) -> TangentVector:
    _check_joint(ctx, p)
    return nat_grad_dist_to_Q(ctx.js, p, ctx.pstar)


def dq_objective(ctx: ObjectiveContext, p: Distribution) -> float:
    """D(q || p) for the fixed recognition distribution."""
    _check_joint(ctx, p)
    return kl_divergence(ctx.require_q(), p)


def dq_grad(ctx: ObjectiveContext, p: Distribution) -> TangentVector:
    _check_joint(ctx, p)
    q = ctx.require_q()
    return TangentVector(p.space, p.probs - q.probs, base=p)


def elbo_expected(ctx: ObjectiveContext, p: Distribution) -> float:
    """Expected evidence lower bound -sum_{v,h} q(v,h) ln(q(h|v)/p(v,h))."""
    _check_joint(ctx, p)
    q = ctx.require_q()
    return K.elbo_sum(q.probs, p.probs, ctx.js.nv, ctx.js.nh)


def elbo_grad(ctx: ObjectiveContext, p: Distribution) -> TangentVector:
    """Natural gradient of the expected ELBO: q - p."""
    _check_joint(ctx, p)
    q = ctx.require_q()
    return TangentVector(p.space, q.probs - p.probs, base=p)


def elbo_pointwise(
    js: JointSpace, p: Distribution, q_cond: np.ndarray, x_v: int
) -> float:
    """Evidence lower bound for a single visible state.

    q_cond is an (nv, nh) row-stochastic table of strictly positive
    conditionals.  The returned value never exceeds ln of the visible
    marginal at x_v, with equality exactly when row x_v matches the true
    conditional p(. | x_v).  No visible target is needed, so point-mass
    evidence queries stay well-defined.
    """
    if p.space.size != js.joint.size:
        raise DimensionMismatch("expected a joint-space distribution")
    q_cond = np.asarray(q_cond, dtype=np.float64)
    if q_cond.shape != (js.nv, js.nh):
        raise DimensionMismatch(
            f"conditional table has shape {q_cond.shape}, "
            f"expected ({js.nv}, {js.nh})"
        )
    if not 0 <= x_v < js.nv:
        raise DimensionMismatch(f"visible state {x_v} out of range")
    row = q_cond[x_v]
    joint_row = p.probs[x_v * js.nh : (x_v + 1) * js.nh]
    return -float(np.sum(row * (np.log(row) - np.log(joint_row))))
