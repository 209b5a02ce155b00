"""Tests for the finite-difference natural-gradient oracle."""

import numpy as np
import pytest

from fisherflow import (
    StateSpace,
    StepTooLarge,
    default_rng,
    fisher_norm,
    kl_divergence,
    make_distribution,
    nat_grad_kl_first,
    nat_grad_kl_second,
    tempered_distribution,
)
from fisherflow.oracle import DEFAULT_STEP, fd_natural_gradient


def _rel_error(got, want, p):
    diff = got.coords - want.coords
    from fisherflow import TangentVector

    return fisher_norm(p, TangentVector(p.space, diff)) / max(
        fisher_norm(p, want), 1e-300
    )


class TestOracleAgreement:
    def test_matches_second_slot_gradient(self):
        rng = default_rng(0)
        space = StateSpace(5)
        for _ in range(25):
            q = tempered_distribution(space, rng)
            p = tempered_distribution(space, rng)
            fd = fd_natural_gradient(lambda r: kl_divergence(q, r), p)
            closed = nat_grad_kl_second(p, q)
            assert _rel_error(fd, closed, p) <= 1e-6

    def test_matches_first_slot_gradient(self):
        rng = default_rng(1)
        space = StateSpace(4)
        for _ in range(25):
            q = tempered_distribution(space, rng)
            p = tempered_distribution(space, rng)
            fd = fd_natural_gradient(lambda r: kl_divergence(r, p), q)
            closed = nat_grad_kl_first(q, p)
            assert _rel_error(fd, closed, q) <= 1e-6

    def test_zero_sum_output(self):
        rng = default_rng(2)
        space = StateSpace(6)
        p = tempered_distribution(space, rng)
        w = rng.normal(size=6)
        fd = fd_natural_gradient(lambda r: float(np.dot(w, r.probs)), p)
        assert abs(fd.coords.sum()) <= 1e-12


class TestStepControl:
    def test_default_step(self):
        assert DEFAULT_STEP == 1e-5

    def test_rejects_nonpositive_step(self):
        rng = default_rng(3)
        p = tempered_distribution(StateSpace(3), rng)
        with pytest.raises(StepTooLarge):
            fd_natural_gradient(lambda r: 0.0, p, h=0.0)
        with pytest.raises(StepTooLarge):
            fd_natural_gradient(lambda r: 0.0, p, h=-1e-5)

    def test_rejects_step_crossing_the_boundary(self):
        p = make_distribution(StateSpace(3),
                              np.array([1e-4, 0.5, 0.4999]))
        with pytest.raises(StepTooLarge):
            fd_natural_gradient(lambda r: 0.0, p, h=1e-4)

    def test_quadratic_convergence(self):
        # Central differences converge at second order: quartering the
        # error when the step halves.  Measured against the closed form
        # on a smooth objective; the ratio band is generous because the
        # prefactor varies with the draw.
        rng = default_rng(4)
        space = StateSpace(4)
        q = tempered_distribution(space, rng)
        p = tempered_distribution(space, rng)
        closed = nat_grad_kl_first(p, q)

        def err(h):
            fd = fd_natural_gradient(lambda r: kl_divergence(r, q), p, h=h)
            return float(np.max(np.abs(fd.coords - closed.coords)))

        e1, e2 = err(2e-3), err(1e-3)
        assert e1 / e2 == pytest.approx(4.0, rel=0.25)
