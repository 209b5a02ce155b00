"""Tests for parametric models: charts, Fisher matrices, projections,
cylindricity, and pushforward invariance of natural gradients."""

import warnings

import numpy as np
import pytest

from fisherflow import (
    NearSingularFisherWarning,
    ParametricModel,
    RangeMismatch,
    SingularPoint,
    StateSpace,
    TangentVector,
    cylindricity_check,
    default_rng,
    dpi_v,
    fisher_inner,
    fisher_matrix,
    fisher_norm,
    fisher_solve,
    full_simplex_model,
    hv_decompose,
    independence_model,
    jacobian_matrix,
    joint_space,
    kl_divergence,
    log_odds,
    make_distribution,
    marginalize_v,
    natural_param_gradient,
    product_log_odds,
    product_model,
    project_onto_tangent,
    project_to_data_manifold,
    pushforward_invariance_gap,
    random_distribution,
    random_tangent,
    random_tied_pair,
    tied_model,
    tied_visible_model,
)


def _fd_jacobian(m, theta, h=1e-6):
    """Dense central-difference Jacobian of the chart map."""
    cols = []
    for i in range(m.dim):
        up = np.array(theta, dtype=np.float64)
        dn = up.copy()
        up[i] += h
        dn[i] -= h
        cols.append((m.eval(up).probs - m.eval(dn).probs) / (2.0 * h))
    return np.stack(cols, axis=1)


class TestFullSimplexModel:
    def test_dimension(self):
        m = full_simplex_model(StateSpace(5))
        assert m.dim == 4

    def test_chart_round_trip(self):
        rng = default_rng(0)
        space = StateSpace(6)
        p = random_distribution(space, rng)
        m = full_simplex_model(space)
        np.testing.assert_allclose(m.eval(log_odds(p)).probs, p.probs,
                                   rtol=1e-12)

    def test_origin_is_uniform(self):
        m = full_simplex_model(StateSpace(4))
        np.testing.assert_allclose(m.eval(np.zeros(3)).probs, 0.25,
                                   rtol=1e-15)

    def test_jacobian_matches_finite_differences(self):
        rng = default_rng(1)
        space = StateSpace(5)
        m = full_simplex_model(space)
        theta = 0.5 * rng.normal(size=m.dim)
        np.testing.assert_allclose(
            jacobian_matrix(m, theta), _fd_jacobian(m, theta),
            atol=1e-9,
        )

    def test_jacobian_columns_are_tangent(self):
        rng = default_rng(2)
        m = full_simplex_model(StateSpace(4))
        theta = rng.normal(size=m.dim)
        for col in m.jacobian(theta):
            assert abs(col.coords.sum()) <= 1e-12


class TestProductModel:
    def test_dimension(self):
        js = joint_space(3, 4)
        assert product_model(js).dim == 11

    def test_chart_round_trip(self):
        rng = default_rng(3)
        js = joint_space(3, 4)
        p = random_distribution(js.joint, rng)
        m = product_model(js)
        np.testing.assert_allclose(
            m.eval(product_log_odds(js, p)).probs, p.probs, rtol=1e-12
        )

    def test_jacobian_matches_finite_differences(self):
        rng = default_rng(4)
        js = joint_space(2, 3)
        m = product_model(js)
        theta = 0.5 * rng.normal(size=m.dim)
        np.testing.assert_allclose(
            jacobian_matrix(m, theta), _fd_jacobian(m, theta), atol=1e-9
        )

    def test_marginal_depends_only_on_visible_block(self):
        # The first nv-1 coordinates steer the marginal; the per-state
        # conditional blocks leave it untouched.
        rng = default_rng(5)
        js = joint_space(3, 3)
        m = product_model(js)
        theta = rng.normal(size=m.dim)
        bumped = theta.copy()
        bumped[js.nv - 1 :] += rng.normal(size=m.dim - js.nv + 1)
        np.testing.assert_allclose(
            marginalize_v(js, m.eval(theta)).probs,
            marginalize_v(js, m.eval(bumped)).probs,
            rtol=1e-12,
        )


class TestIndependenceModel:
    def test_dimension(self):
        js = joint_space(3, 4)
        assert independence_model(js).dim == 5

    def test_eval_is_outer_product(self):
        rng = default_rng(6)
        js = joint_space(2, 3)
        m = independence_model(js)
        theta = rng.normal(size=m.dim)
        p = m.eval(theta).probs.reshape(js.nv, js.nh)
        pv = p.sum(axis=1)
        ph = p.sum(axis=0)
        np.testing.assert_allclose(p, np.outer(pv, ph), rtol=1e-12)

    def test_jacobian_matches_finite_differences(self):
        rng = default_rng(7)
        js = joint_space(3, 2)
        m = independence_model(js)
        theta = 0.5 * rng.normal(size=m.dim)
        np.testing.assert_allclose(
            jacobian_matrix(m, theta), _fd_jacobian(m, theta), atol=1e-9
        )


class TestTiedModel:
    def test_dimension_is_one(self):
        js = joint_space(2, 2)
        m = tied_model(js, [1.0, -1.0], [[0.5, -0.5], [0.3, -0.3]])
        assert m.dim == 1

    def test_jacobian_matches_finite_differences(self):
        rng = default_rng(8)
        js = joint_space(3, 4)
        m, _ = random_tied_pair(js, rng)
        theta = np.array([0.4])
        np.testing.assert_allclose(
            jacobian_matrix(m, theta), _fd_jacobian(m, theta), atol=1e-9
        )

    def test_visible_marginal_matches_visible_model(self):
        # The marginal of the tied joint curve is the tied visible curve
        # at the same parameter; this makes the pair a valid fibration
        # test case.
        rng = default_rng(9)
        js = joint_space(3, 4)
        m_joint, m_vis = random_tied_pair(js, rng)
        for theta in (np.array([-0.7]), np.array([0.0]), np.array([1.3])):
            np.testing.assert_allclose(
                marginalize_v(js, m_joint.eval(theta)).probs,
                m_vis.eval(theta).probs,
                rtol=1e-12,
            )


class TestFisherMatrix:
    def test_matches_gram_of_scaled_jacobian(self):
        rng = default_rng(10)
        space = StateSpace(5)
        m = full_simplex_model(space)
        theta = rng.normal(size=m.dim)
        fm = fisher_matrix(m, theta)
        jac = jacobian_matrix(m, theta)
        p = m.eval(theta).probs
        expected = jac.T @ (jac / p[:, None])
        np.testing.assert_allclose(fm.entries, expected, rtol=1e-10,
                                   atol=1e-14)

    def test_symmetric_positive_definite(self):
        rng = default_rng(11)
        js = joint_space(2, 3)
        m = product_model(js)
        theta = rng.normal(size=m.dim)
        fm = fisher_matrix(m, theta)
        np.testing.assert_allclose(fm.entries, fm.entries.T, atol=1e-14)
        assert np.linalg.eigvalsh(fm.entries).min() > 0.0
        assert fm.condition >= 1.0

    def test_logistic_curve_value(self):
        # One-parameter logistic curve p = (sigma(t), 1 - sigma(t)) on a
        # binary space: dp/dt at 0 is (1/4, -1/4), so the Fisher scalar
        # is 2 * (1/16) / (1/2) = 1/4.
        m = tied_visible_model(StateSpace(2), [1.0, 0.0])
        fm = fisher_matrix(m, np.zeros(1))
        assert fm.entries[0, 0] == pytest.approx(0.25, rel=1e-12)

    def test_solve_round_trip(self):
        rng = default_rng(12)
        m = full_simplex_model(StateSpace(4))
        theta = rng.normal(size=m.dim)
        fm = fisher_matrix(m, theta)
        rhs = rng.normal(size=m.dim)
        np.testing.assert_allclose(fm.entries @ fm.solve(rhs), rhs,
                                   rtol=1e-9, atol=1e-12)

    def test_singular_point_raises(self):
        space = StateSpace(3)
        dead = ParametricModel(
            dim=2,
            space=space,
            eval=lambda th: make_distribution(space,
                                              np.array([0.2, 0.3, 0.5])),
            jacobian=lambda th: [
                TangentVector(space, np.array([0.1, -0.1, 0.0])),
                TangentVector(space, np.zeros(3)),
            ],
            name="degenerate",
        )
        with pytest.raises(SingularPoint):
            fisher_matrix(dead, np.zeros(2))

    def test_near_singular_solve_warns(self):
        entries = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
        with pytest.warns(NearSingularFisherWarning):
            x = fisher_solve(entries, np.array([1.0, 1.0]))
        assert np.all(np.isfinite(x))


class TestTangentProjection:
    def test_residual_is_fisher_orthogonal(self):
        rng = default_rng(13)
        js = joint_space(3, 3)
        m = product_model(js)
        theta = rng.normal(size=m.dim)
        p = m.eval(theta)
        vec = random_tangent(p, rng)
        _, projected = project_onto_tangent(m, theta, vec)
        residual = TangentVector(p.space, vec.coords - projected.coords)
        for col in m.jacobian(theta):
            assert abs(fisher_inner(p, residual, col)) <= 1e-9

    def test_fixes_tangent_vectors(self):
        rng = default_rng(14)
        js = joint_space(2, 3)
        m = independence_model(js)
        theta = rng.normal(size=m.dim)
        cols = m.jacobian(theta)
        weights = rng.normal(size=m.dim)
        in_range = TangentVector(
            m.space,
            sum(w * c.coords for w, c in zip(weights, cols)),
        )
        coeffs, projected = project_onto_tangent(m, theta, in_range)
        np.testing.assert_allclose(projected.coords, in_range.coords,
                                   atol=1e-11)
        np.testing.assert_allclose(coeffs, weights, rtol=1e-8, atol=1e-10)

    def test_kills_orthogonal_vectors(self):
        # Build a vector Fisher-orthogonal to the tangent space by
        # subtracting its own projection, then check idempotence.
        rng = default_rng(15)
        js = joint_space(2, 2)
        m = independence_model(js)
        theta = rng.normal(size=m.dim)
        p = m.eval(theta)
        vec = random_tangent(p, rng)
        _, projected = project_onto_tangent(m, theta, vec)
        residual = TangentVector(p.space, vec.coords - projected.coords)
        _, again = project_onto_tangent(m, theta, residual)
        np.testing.assert_allclose(again.coords, 0.0, atol=1e-10)

    def test_full_model_projection_is_identity(self):
        rng = default_rng(16)
        space = StateSpace(5)
        m = full_simplex_model(space)
        theta = rng.normal(size=m.dim)
        p = m.eval(theta)
        vec = random_tangent(p, rng)
        _, projected = project_onto_tangent(m, theta, vec)
        np.testing.assert_allclose(projected.coords, vec.coords, atol=1e-10)


class TestNaturalParamGradient:
    def test_solves_fisher_system(self):
        rng = default_rng(17)
        js = joint_space(2, 3)
        m = product_model(js)
        theta = rng.normal(size=m.dim)
        grad = rng.normal(size=m.dim)
        u = natural_param_gradient(m, theta, grad)
        fm = fisher_matrix(m, theta)
        np.testing.assert_allclose(fm.entries @ u, grad, rtol=1e-9,
                                   atol=1e-12)

    def test_full_model_matches_ambient_gradient(self):
        # On the full chart the parameter-space natural gradient pushes
        # forward to the ambient natural gradient of the same objective.
        rng = default_rng(18)
        space = StateSpace(4)
        m = full_simplex_model(space)
        theta = rng.normal(size=m.dim)
        p = m.eval(theta)
        pstar = random_distribution(space, rng)
        # Euclidean parameter gradient of theta -> D(pstar || p(theta))
        # via the chain rule through the chart map.
        jac = jacobian_matrix(m, theta)
        euclid = jac.T @ (-pstar.probs / p.probs)
        u = natural_param_gradient(m, theta, euclid)
        pushed = jac @ u
        np.testing.assert_allclose(pushed, p.probs - pstar.probs,
                                   rtol=1e-8, atol=1e-11)


class TestCylindricity:
    def test_full_model_is_cylindrical(self):
        rng = default_rng(19)
        js = joint_space(3, 4)
        m = full_simplex_model(js.joint, joint_space=js)
        theta = 0.5 * rng.normal(size=m.dim)
        report = cylindricity_check(m, theta)
        assert report.is_cylindrical
        assert report.dim_tangent == 11
        assert report.dim_h_intersection == 2
        assert report.dim_v_intersection == 9

    def test_product_model_splits(self):
        rng = default_rng(20)
        js = joint_space(3, 4)
        m = product_model(js)
        for _ in range(10):
            theta = 0.7 * rng.normal(size=m.dim)
            report = cylindricity_check(m, theta)
            assert report.is_cylindrical
            assert report.dim_h_intersection == js.nv - 1
            assert report.dim_v_intersection == js.nv * (js.nh - 1)

    def test_independence_model_splits(self):
        rng = default_rng(21)
        js = joint_space(3, 3)
        m = independence_model(js)
        for _ in range(10):
            theta = 0.7 * rng.normal(size=m.dim)
            report = cylindricity_check(m, theta)
            assert report.is_cylindrical
            assert report.dim_h_intersection == js.nv - 1
            assert report.dim_v_intersection == js.nh - 1

    def test_tied_model_is_nowhere_cylindrical(self):
        rng = default_rng(22)
        js = joint_space(3, 4)
        m, _ = random_tied_pair(js, rng)
        for theta in np.linspace(-1.5, 1.5, 7):
            report = cylindricity_check(m, np.array([theta]))
            assert not report.is_cylindrical
            assert report.dim_tangent == 1
            assert report.dim_h_intersection == 0
            assert report.dim_v_intersection == 0


class TestPushforwardInvarianceGap:
    def _visible_objective(self, pstar):
        def grad(p_v):
            return TangentVector(p_v.space, p_v.probs - pstar.probs)

        return grad

    def test_product_model_gap_vanishes_all_modes(self):
        rng = default_rng(23)
        js = joint_space(3, 4)
        m_joint = product_model(js)
        m_vis = full_simplex_model(js.visible)
        for _ in range(10):
            theta = 0.7 * rng.normal(size=m_joint.dim)
            p = m_joint.eval(theta)
            theta_vis = log_odds(marginalize_v(js, p))
            pstar = random_distribution(js.visible, rng)
            gap = pushforward_invariance_gap(
                m_joint, m_vis, theta, theta_vis,
                self._visible_objective(pstar), mode="pullback",
            )
            assert gap <= 1e-8
            gap = pushforward_invariance_gap(
                m_joint, m_vis, theta, theta_vis, pstar, mode="dist_to_q",
            )
            assert gap <= 1e-8
            q = project_to_data_manifold(js, p, pstar)
            gap = pushforward_invariance_gap(
                m_joint, m_vis, theta, theta_vis, q, mode="fixed_q",
            )
            assert gap <= 1e-8

    def test_tied_model_gap_is_large(self):
        rng = default_rng(24)
        js = joint_space(3, 4)
        hits = 0
        for _ in range(30):
            m_joint, m_vis = random_tied_pair(js, rng)
            theta = 0.5 * rng.normal(size=1)
            p = m_joint.eval(theta)
            pstar = random_distribution(js.visible, rng)
            q = project_to_data_manifold(js, p, pstar)
            gap = pushforward_invariance_gap(
                m_joint, m_vis, theta, theta, q, mode="fixed_q",
            )
            if gap > 1e-3:
                hits += 1
        assert hits > 0

    def test_marginal_mismatch_rejected(self):
        rng = default_rng(25)
        js = joint_space(2, 3)
        m_joint = product_model(js)
        m_vis = full_simplex_model(js.visible)
        theta = rng.normal(size=m_joint.dim)
        theta_vis = np.array([1.7])  # deliberately not the marginal chart
        pstar = random_distribution(js.visible, rng)
        with pytest.raises(ValueError):
            pushforward_invariance_gap(
                m_joint, m_vis, theta, theta_vis, pstar, mode="dist_to_q",
            )

    def test_range_mismatch_detected(self):
        # A one-parameter joint curve cannot push forward onto the full
        # visible tangent space, so the rank condition must fail.
        rng = default_rng(26)
        js = joint_space(3, 4)
        m_joint, _ = random_tied_pair(js, rng)
        m_vis = full_simplex_model(js.visible)
        theta = np.array([0.3])
        theta_vis = log_odds(marginalize_v(js, m_joint.eval(theta)))
        pstar = random_distribution(js.visible, rng)
        with pytest.raises(RangeMismatch):
            pushforward_invariance_gap(
                m_joint, m_vis, theta, theta_vis, pstar, mode="dist_to_q",
            )

    def test_unknown_mode_rejected(self):
        js = joint_space(2, 2)
        m_joint = product_model(js)
        m_vis = full_simplex_model(js.visible)
        with pytest.raises(ValueError):
            pushforward_invariance_gap(
                m_joint, m_vis, np.zeros(m_joint.dim),
                np.zeros(m_vis.dim), None, mode="sideways",
            )


class TestSubmersionIdentity:
    def test_horizontal_inner_products_survive_pushforward(self):
        # For horizontal tangents of the product model, the Fisher inner
        # product downstairs equals the one upstairs.
        rng = default_rng(27)
        js = joint_space(3, 3)
        m = product_model(js)
        theta = 0.5 * rng.normal(size=m.dim)
        p = m.eval(theta)
        p_v = marginalize_v(js, p)
        for _ in range(10):
            a = hv_decompose(js, p, random_tangent(p, rng)).horizontal
            b = hv_decompose(js, p, random_tangent(p, rng)).horizontal
            up = fisher_inner(p, a, b)
            down = fisher_inner(p_v, dpi_v(js, a), dpi_v(js, b))
            assert down == pytest.approx(up, rel=1e-9, abs=1e-12)
