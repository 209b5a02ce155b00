"""Joint visible/hidden state spaces and the marginalization fibration.

A joint space couples a visible space V (size nv) and a hidden space H
(size nh).  Joint states are flattened row-major in the visible index:
state (v, h) sits at flat index v * nh + h.  This layout is fixed; file
formats and kernels rely on it.

The marginalization map pi_V sends a joint distribution to its visible
marginal; its differential d pi_V sums tangent coordinates over h.  At a
joint point p the tangent space splits Fisher-orthogonally into

    vertical   V_p = ker d pi_V          (invisible to the marginal)
    horizontal H_p = V_p^perp            (Fisher-Rao complement)

with the horizontal projection in closed form:

    A_H(v, h) = p(h | v) * (d pi_V A)(v).

The data manifold for a visible target p* is the set of joint q with
marginal p*; the projection onto it is q(v, h) = p*(v) p(h | v), and the
natural gradient of the divergence from that set is p minus its projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend as K
from .errors import DimensionMismatch
from .simplex import Distribution, StateSpace, TangentVector


@dataclass(frozen=True, eq=False)
class JointSpace:
    """Product state space with fixed (visible-major) flattening."""

    visible: StateSpace
    hidden: StateSpace
    joint: StateSpace

    def __post_init__(self):
        if self.joint.size != self.visible.size * self.hidden.size:
            raise ValueError(
                f"joint size {self.joint.size} != "
                f"{self.visible.size} * {self.hidden.size}"
            )

    @property
    def nv(self) -> int:
        return self.visible.size

    @property
    def nh(self) -> int:
        return self.hidden.size

    def flat_index(self, v: int, h: int) -> int:
        if not (0 <= v < self.nv and 0 <= h < self.nh):
            raise DimensionMismatch(f"state ({v}, {h}) out of range")
        return v * self.nh + h

    def state_pair(self, k: int) -> tuple[int, int]:
        if not 0 <= k < self.joint.size:
            raise DimensionMismatch(f"flat index {k} out of range")
        return divmod(k, self.nh)


def joint_space(nv: int, nh: int) -> JointSpace:
    """Build a JointSpace from visible and hidden state counts."""
    return JointSpace(StateSpace(nv), StateSpace(nh), StateSpace(nv * nh))


def _check_joint(js: JointSpace, x) -> None:
    if x.space.size != js.joint.size:
        raise DimensionMismatch(
            f"expected joint vector of size {js.joint.size}, got {x.space.size}"
        )


@dataclass(frozen=True, eq=False)
class HVDecomposition:
    """Orthogonal splitting A = horizontal + vertical at a joint point."""

    horizontal: TangentVector
    vertical: TangentVector


def marginalize_v(js: JointSpace, p: Distribution) -> Distribution:
    """Visible marginal: out(v) = sum_h p(v, h)."""
    _check_joint(js, p)
    return Distribution(js.visible, K.row_sums(p.probs, js.nv, js.nh))


def dpi_v(js: JointSpace, a: TangentVector) -> TangentVector:
    """Differential of marginalization: out(v) = sum_h a(v, h)."""
    _check_joint(js, a)
    base = marginalize_v(js, a.base) if a.base is not None else None
    return TangentVector(js.visible, K.row_sums(a.coords, js.nv, js.nh), base=base)


def conditional_h_given_v(js: JointSpace, p: Distribution) -> np.ndarray:
    """Conditional table, shape (nv, nh): row v is p(. | v)."""
    _check_joint(js, p)
    return K.conditional_rows(p.probs, js.nv, js.nh)


def project_to_data_manifold(
    js: JointSpace, p: Distribution, pstar: Distribution
) -> Distribution:
    """Reweight p to the target marginal: out(v, h) = pstar(v) p(h | v)."""
    _check_joint(js, p)
    if pstar.space.size != js.nv:
        raise DimensionMismatch("target marginal lives on the wrong space")
    cond = K.conditional_rows(p.probs, js.nv, js.nh)
    return Distribution(js.joint, K.horizontal_lift(cond, pstar.probs))


def hv_decompose(js: JointSpace, p: Distribution, a: TangentVector) -> HVDecomposition:
    """Split a into horizontal and vertical parts at p.

    The horizontal part is the conditional reweighting of the pushed-down
    marginal, A_H(v, h) = p(h|v) (d pi_V a)(v); the vertical part is the
    remainder.  Orthogonality and the Pythagorean norm identity are
    guaranteed by construction and asserted by the test suite.
    """
    _check_joint(js, p)
    _check_joint(js, a)
    c = K.row_sums(a.coords, js.nv, js.nh)
    cond = K.conditional_rows(p.probs, js.nv, js.nh)
    ah = K.horizontal_lift(cond, c)
    horizontal = TangentVector(js.joint, ah, base=p)
    vertical = TangentVector(js.joint, a.coords - ah, base=p)
    return HVDecomposition(horizontal=horizontal, vertical=vertical)


def nat_grad_dist_to_Q(
    js: JointSpace, p: Distribution, pstar: Distribution
) -> TangentVector:
    """Natural gradient of the divergence from the data manifold of pstar.

    Equals p minus its projection onto that manifold; always horizontal,
    and pushes forward to (marginal of p) - pstar.
    """
    proj = project_to_data_manifold(js, p, pstar)
    return TangentVector(js.joint, p.probs - proj.probs, base=p)


def vertical_basis(js: JointSpace) -> list[TangentVector]:
    """Spanning set of the vertical space: delta(v,h) - delta(v,h+1)."""
    out = []
    nv, nh = js.nv, js.nh
    for v in range(nv):
        for h in range(nh - 1):
            coords = np.zeros(nv * nh)
            coords[v * nh + h] = 1.0
            coords[v * nh + h + 1] = -1.0
            out.append(TangentVector(js.joint, coords))
    return out
