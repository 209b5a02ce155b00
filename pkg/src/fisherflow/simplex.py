"""Finite probability simplex: distributions, tangent vectors, Fisher-Rao
metric, KL divergence, and closed-form natural gradients.

Conventions
-----------
A distribution on a finite state space of size n is a dense strictly
positive vector p with sum 1.  A tangent vector at p is a dense vector A
with sum 0.  The Fisher-Rao inner product at p is

    g_p(A, B) = sum_x A(x) B(x) / p(x),

and the KL divergence is D(q || p) = sum_x q(x) ln(q(x) / p(x)), in nats.

The natural (Fisher-Rao) gradient of a differentiable function f at p has
coordinates p(x) (df/dp(x) - sum_x' p(x') df/dp(x')); the centering makes
the result independent of how f is extended off the simplex.  Two KL
gradients have closed forms used throughout:

    grad_p D(q || .) = p - q
    grad_q D(. || p) = q (ln(q/p) - E_q[ln(q/p)])

All types are immutable values and all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend as K
from .errors import DimensionMismatch, NonPositiveEntry

# Construction guards.  Entries at or below MIN_PROBABILITY are rejected;
# nothing is ever clamped.
MIN_PROBABILITY = 1e-300
SUM_ABS_TOL = 1e-12
ZERO_SUM_ABS_TOL = 1e-12


def _as_vector(raw, size, what):
    arr = np.ascontiguousarray(raw, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != size:
        raise DimensionMismatch(
            f"{what} has shape {arr.shape}, expected ({size},)"
        )
    return arr


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Index set of a finite state space; states are 0..size-1."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"state space needs at least 2 states, got {self.size}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.size:
                raise ValueError(
                    f"{len(labels)} labels for {self.size} states"
                )
            if len(set(labels)) != len(labels):
                raise ValueError("state labels must be distinct")
            object.__setattr__(self, "labels", labels)


@dataclass(frozen=True, eq=False)
class Distribution:
    """Strictly positive probability vector on a StateSpace.

    The constructor requires entries > MIN_PROBABILITY and a sum within
    SUM_ABS_TOL of 1, then renormalizes to a machine-exact unit sum.  Use
    make_distribution to normalize an arbitrary positive vector.
    """

    space: StateSpace
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _as_vector(self.probs, self.space.size, "probability vector")
        if np.any(arr <= MIN_PROBABILITY):
            raise NonPositiveEntry(
                f"minimum entry {arr.min():.3e} is not strictly positive"
            )
        total = arr.sum()
        if abs(total - 1.0) > SUM_ABS_TOL:
            raise ValueError(
                f"probabilities sum to {total!r}, expected 1 within {SUM_ABS_TOL}"
            )
        arr = arr / total
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    def __sub__(self, other: "Distribution") -> "TangentVector":
        """Difference vector other -> self, based at self."""
        if other.space.size != self.space.size:
            raise DimensionMismatch("distributions live on different spaces")
        return TangentVector(self.space, self.probs - other.probs, base=self)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Zero-sum coordinate vector, optionally anchored at a base point."""

    space: StateSpace
    coords: np.ndarray = field(repr=False)
    base: Distribution | None = None

    def __post_init__(self):
        arr = _as_vector(self.coords, self.space.size, "tangent vector")
        if abs(arr.sum()) > ZERO_SUM_ABS_TOL:
            raise ValueError(
                f"tangent coordinates sum to {arr.sum():.3e}, expected 0 "
                f"within {ZERO_SUM_ABS_TOL}"
            )
        if self.base is not None and self.base.space.size != self.space.size:
            raise DimensionMismatch("base distribution lives on a different space")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        if other.space.size != self.space.size:
            raise DimensionMismatch("tangent vectors live on different spaces")
        return TangentVector(self.space, self.coords + other.coords, base=self.base)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        if other.space.size != self.space.size:
            raise DimensionMismatch("tangent vectors live on different spaces")
        return TangentVector(self.space, self.coords - other.coords, base=self.base)

    def __mul__(self, scalar: float) -> "TangentVector":
        return TangentVector(self.space, self.coords * float(scalar), base=self.base)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.space, -self.coords, base=self.base)


def make_distribution(space: StateSpace, raw) -> Distribution:
    """Normalize a strictly positive vector into a Distribution."""
    arr = _as_vector(raw, space.size, "raw vector")
    if np.any(arr <= MIN_PROBABILITY):
        raise NonPositiveEntry(
            f"minimum entry {arr.min():.3e} is not strictly positive"
        )
    return Distribution(space, arr / arr.sum())


def _check_sizes(p, *vecs):
    for v in vecs:
        if v.space.size != p.space.size:
            raise DimensionMismatch("operands live on different state spaces")


def fisher_inner(p: Distribution, a: TangentVector, b: TangentVector) -> float:
    """Fisher-Rao inner product g_p(a, b) = sum_x a(x) b(x) / p(x)."""
    _check_sizes(p, a, b)
    return K.fisher_inner(p.probs, a.coords, b.coords)


def fisher_norm(p: Distribution, a: TangentVector) -> float:
    """Fisher-Rao norm sqrt(g_p(a, a))."""
    return float(np.sqrt(max(fisher_inner(p, a, a), 0.0)))


def kl_divergence(q: Distribution, p: Distribution) -> float:
    """KL divergence D(q || p) in nats."""
    _check_sizes(q, p)
    return K.kl_div(q.probs, p.probs)


def nat_grad_kl_second(p: Distribution, q: Distribution) -> TangentVector:
    """Natural gradient of p -> D(q || p): the difference vector p - q."""
    _check_sizes(p, q)
    return TangentVector(p.space, p.probs - q.probs, base=p)


def nat_grad_kl_first(q: Distribution, p: Distribution) -> TangentVector:
    """Natural gradient of q -> D(q || p).

    Coordinates q(x) (ln(q(x)/p(x)) - E_q[ln(q/p)]); the subtracted
    expectation makes the result zero-sum and invariant under positive
    rescaling of p.
    """
    _check_sizes(q, p)
    log_ratio = np.log(q.probs / p.probs)
    centered = log_ratio - np.dot(q.probs, log_ratio)
    return TangentVector(q.space, q.probs * centered, base=q)


def nat_grad_from_partials(p: Distribution, partials) -> TangentVector:
    """Natural gradient from Euclidean partials df/dp(x).

    Coordinates p(x) (partials(x) - sum_x' p(x') partials(x')).  The
    centering annihilates constants, so any smooth extension of f off the
    simplex yields the same result.
    """
    arr = _as_vector(partials, p.space.size, "partials vector")
    centered = arr - np.dot(p.probs, arr)
    return TangentVector(p.space, p.probs * centered, base=p)
