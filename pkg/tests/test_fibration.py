"""Tests for the marginalization fibration over a visible/hidden split."""

import numpy as np
import pytest

from fisherflow import (
    DimensionMismatch,
    StateSpace,
    TangentVector,
    conditional_h_given_v,
    default_rng,
    dpi_v,
    fisher_inner,
    fisher_norm,
    hv_decompose,
    joint_space,
    kl_divergence,
    make_distribution,
    marginalize_v,
    nat_grad_dist_to_Q,
    project_to_data_manifold,
    random_distribution,
    random_tangent,
    vertical_basis,
)


def _joint(js, probs):
    return make_distribution(js.joint, np.asarray(probs, dtype=np.float64))


def _visible(js, probs):
    return make_distribution(js.visible, np.asarray(probs, dtype=np.float64))


class TestJointSpace:
    def test_sizes(self):
        js = joint_space(3, 4)
        assert js.nv == 3 and js.nh == 4
        assert js.joint.size == 12

    def test_flat_index_is_visible_major(self):
        js = joint_space(3, 4)
        assert js.flat_index(0, 0) == 0
        assert js.flat_index(0, 3) == 3
        assert js.flat_index(1, 0) == 4
        assert js.flat_index(2, 3) == 11

    def test_state_pair_round_trip(self):
        js = joint_space(4, 3)
        for i in range(js.joint.size):
            v, h = js.state_pair(i)
            assert js.flat_index(v, h) == i

    def test_rejects_degenerate_factors(self):
        with pytest.raises(ValueError):
            joint_space(1, 4)


class TestMarginalization:
    def test_row_sums(self):
        js = joint_space(2, 2)
        p = _joint(js, [0.1, 0.2, 0.3, 0.4])
        pv = marginalize_v(js, p)
        np.testing.assert_allclose(pv.probs, [0.3, 0.7], rtol=1e-15)

    def test_dpi_sums_tangent_rows(self):
        js = joint_space(2, 3)
        a = TangentVector(
            js.joint, np.array([0.1, -0.05, 0.02, -0.04, 0.03, -0.06])
        )
        da = dpi_v(js, a)
        np.testing.assert_allclose(da.coords, [0.07, -0.07], atol=1e-15)

    def test_fibration_exactness(self):
        # dpi_v of a coordinatewise difference equals the difference of
        # marginals, by linearity of both maps.
        rng = default_rng(0)
        js = joint_space(3, 4)
        for _ in range(20):
            p = random_distribution(js.joint, rng)
            q = random_distribution(js.joint, rng)
            diff = TangentVector(js.joint, p.probs - q.probs)
            lhs = dpi_v(js, diff).coords
            rhs = marginalize_v(js, p).probs - marginalize_v(js, q).probs
            np.testing.assert_allclose(lhs, rhs, atol=1e-14)

    def test_conditional_rows_frozen_example(self):
        js = joint_space(2, 2)
        p = _joint(js, [0.1, 0.2, 0.3, 0.4])
        cond = conditional_h_given_v(js, p)
        np.testing.assert_allclose(
            cond, [[1.0 / 3.0, 2.0 / 3.0], [3.0 / 7.0, 4.0 / 7.0]], rtol=1e-14
        )

    def test_conditional_rows_are_stochastic(self):
        rng = default_rng(1)
        js = joint_space(4, 3)
        p = random_distribution(js.joint, rng)
        cond = conditional_h_given_v(js, p)
        np.testing.assert_allclose(cond.sum(axis=1), 1.0, rtol=1e-14)


class TestDataManifoldProjection:
    def test_frozen_example(self):
        js = joint_space(2, 2)
        p = _joint(js, [0.25, 0.25, 0.25, 0.25])
        pstar = _visible(js, [0.3, 0.7])
        proj = project_to_data_manifold(js, p, pstar)
        np.testing.assert_allclose(
            proj.probs, [0.15, 0.15, 0.35, 0.35], rtol=1e-14
        )

    def test_lands_on_data_manifold(self):
        rng = default_rng(2)
        js = joint_space(3, 4)
        for _ in range(20):
            p = random_distribution(js.joint, rng)
            pstar = random_distribution(js.visible, rng)
            proj = project_to_data_manifold(js, p, pstar)
            np.testing.assert_allclose(
                marginalize_v(js, proj).probs, pstar.probs, rtol=1e-12
            )

    def test_fixed_point_on_data_manifold(self):
        rng = default_rng(3)
        js = joint_space(2, 3)
        p = random_distribution(js.joint, rng)
        pstar = marginalize_v(js, p)
        proj = project_to_data_manifold(js, p, pstar)
        np.testing.assert_allclose(proj.probs, p.probs, rtol=1e-13)

    def test_preserves_conditionals(self):
        rng = default_rng(4)
        js = joint_space(3, 3)
        p = random_distribution(js.joint, rng)
        pstar = random_distribution(js.visible, rng)
        proj = project_to_data_manifold(js, p, pstar)
        np.testing.assert_allclose(
            conditional_h_given_v(js, proj),
            conditional_h_given_v(js, p),
            rtol=1e-12,
        )

    def test_realizes_infimum_over_data_manifold(self):
        # D(proj || p) <= D(q || p) for any other q with the target
        # marginal; probe with random conditional perturbations.
        rng = default_rng(5)
        js = joint_space(2, 3)
        p = random_distribution(js.joint, rng)
        pstar = _visible(js, [0.4, 0.6])
        proj = project_to_data_manifold(js, p, pstar)
        best = kl_divergence(proj, p)
        for _ in range(25):
            cond = rng.exponential(size=(js.nv, js.nh))
            cond /= cond.sum(axis=1, keepdims=True)
            q = _joint(js, (pstar.probs[:, None] * cond).ravel())
            assert kl_divergence(q, p) >= best - 1e-12


class TestNatGradDistToQ:
    def test_frozen_example(self):
        js = joint_space(2, 2)
        p = _joint(js, [0.25, 0.25, 0.25, 0.25])
        pstar = _visible(js, [0.3, 0.7])
        g = nat_grad_dist_to_Q(js, p, pstar)
        np.testing.assert_allclose(g.coords, [0.1, 0.1, -0.1, -0.1],
                                   atol=1e-15)

    def test_zero_on_data_manifold(self):
        rng = default_rng(6)
        js = joint_space(3, 2)
        p = random_distribution(js.joint, rng)
        g = nat_grad_dist_to_Q(js, p, marginalize_v(js, p))
        np.testing.assert_allclose(g.coords, 0.0, atol=1e-15)

    def test_pushforward_recovers_marginal_gap(self):
        rng = default_rng(7)
        js = joint_space(3, 4)
        for _ in range(20):
            p = random_distribution(js.joint, rng)
            pstar = random_distribution(js.visible, rng)
            g = nat_grad_dist_to_Q(js, p, pstar)
            np.testing.assert_allclose(
                dpi_v(js, g).coords,
                marginalize_v(js, p).probs - pstar.probs,
                atol=1e-14,
            )

    def test_result_is_horizontal(self):
        rng = default_rng(8)
        js = joint_space(2, 4)
        p = random_distribution(js.joint, rng)
        pstar = random_distribution(js.visible, rng)
        g = nat_grad_dist_to_Q(js, p, pstar)
        split = hv_decompose(js, p, g)
        np.testing.assert_allclose(split.vertical.coords, 0.0, atol=1e-12)


class TestHVDecomposition:
    def test_additivity(self):
        rng = default_rng(9)
        js = joint_space(3, 4)
        for _ in range(50):
            p = random_distribution(js.joint, rng)
            a = random_tangent(p, rng)
            split = hv_decompose(js, p, a)
            np.testing.assert_allclose(
                split.horizontal.coords + split.vertical.coords,
                a.coords,
                atol=1e-14,
            )

    def test_vertical_part_is_vertical(self):
        rng = default_rng(10)
        js = joint_space(3, 3)
        for _ in range(50):
            p = random_distribution(js.joint, rng)
            a = random_tangent(p, rng)
            split = hv_decompose(js, p, a)
            np.testing.assert_allclose(
                dpi_v(js, split.vertical).coords, 0.0, atol=1e-13
            )

    def test_horizontal_orthogonal_to_vertical_spanning_set(self):
        rng = default_rng(11)
        js = joint_space(2, 3)
        for _ in range(20):
            p = random_distribution(js.joint, rng)
            a = random_tangent(p, rng)
            split = hv_decompose(js, p, a)
            for b in vertical_basis(js):
                assert abs(fisher_inner(p, split.horizontal, b)) <= 1e-10

    def test_pythagoras(self):
        rng = default_rng(12)
        js = joint_space(4, 3)
        for _ in range(50):
            p = random_distribution(js.joint, rng)
            a = random_tangent(p, rng)
            split = hv_decompose(js, p, a)
            total = fisher_inner(p, a, a)
            parts = fisher_inner(
                p, split.horizontal, split.horizontal
            ) + fisher_inner(p, split.vertical, split.vertical)
            assert parts == pytest.approx(total, rel=1e-9)

    def test_horizontal_closed_form(self):
        # A^H(v, h) = p(h|v) * (dpi A)(v).
        rng = default_rng(13)
        js = joint_space(3, 4)
        p = random_distribution(js.joint, rng)
        a = random_tangent(p, rng)
        split = hv_decompose(js, p, a)
        cond = conditional_h_given_v(js, p)
        pushed = dpi_v(js, a).coords
        expected = (cond * pushed[:, None]).ravel()
        np.testing.assert_allclose(split.horizontal.coords, expected,
                                   atol=1e-13)

    def test_horizontal_fixed_points_have_constant_ratio(self):
        # A is purely horizontal iff A(v,h)/p(v,h) is constant in h for
        # each v; check the forward direction by constructing such an A.
        rng = default_rng(14)
        js = joint_space(3, 2)
        p = random_distribution(js.joint, rng)
        c = rng.normal(size=js.nv)
        c -= np.dot(marginalize_v(js, p).probs, c)
        coords = (p.probs.reshape(js.nv, js.nh) * c[:, None]).ravel()
        a = TangentVector(js.joint, coords)
        split = hv_decompose(js, p, a)
        np.testing.assert_allclose(split.vertical.coords, 0.0, atol=1e-13)
        # And the converse: a generic tangent with nonconstant ratio
        # must pick up a vertical component.
        b = random_tangent(p, rng)
        ratios = b.coords.reshape(js.nv, js.nh) / p.probs.reshape(
            js.nv, js.nh
        )
        assert np.ptp(ratios, axis=1).max() > 1e-3
        assert fisher_norm(p, hv_decompose(js, p, b).vertical) > 1e-6

    def test_split_of_difference_to_data_manifold(self):
        # For q on the data manifold (marginal = pstar), the horizontal
        # part of p - q is p - proj(p) where proj matches conditionals.
        rng = default_rng(15)
        js = joint_space(2, 3)
        for _ in range(30):
            p = random_distribution(js.joint, rng)
            pstar = random_distribution(js.visible, rng)
            cond = rng.exponential(size=(js.nv, js.nh))
            cond /= cond.sum(axis=1, keepdims=True)
            q = _joint(js, (pstar.probs[:, None] * cond).ravel())
            split = hv_decompose(js, p, TangentVector(js.joint,
                                                      p.probs - q.probs))
            proj = project_to_data_manifold(js, p, pstar)
            np.testing.assert_allclose(
                split.horizontal.coords, p.probs - proj.probs, atol=1e-12
            )


class TestVerticalBasis:
    def test_spans_kernel_of_dpi(self):
        js = joint_space(3, 4)
        basis = vertical_basis(js)
        assert len(basis) == js.nv * (js.nh - 1)
        for b in basis:
            np.testing.assert_allclose(dpi_v(js, b).coords, 0.0, atol=1e-15)

    def test_linearly_independent(self):
        js = joint_space(2, 4)
        mat = np.stack([b.coords for b in vertical_basis(js)])
        assert np.linalg.matrix_rank(mat) == mat.shape[0]


class TestSpaceChecks:
    def test_marginalize_rejects_wrong_space(self):
        js = joint_space(2, 2)
        p = make_distribution(StateSpace(3), np.array([0.2, 0.3, 0.5]))
        with pytest.raises(DimensionMismatch):
            marginalize_v(js, p)

    def test_projection_rejects_swapped_arguments(self):
        js = joint_space(2, 3)
        rng = default_rng(16)
        p = random_distribution(js.joint, rng)
        with pytest.raises(DimensionMismatch):
            project_to_data_manifold(js, p, p)
