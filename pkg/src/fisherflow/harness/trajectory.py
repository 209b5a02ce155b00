"""Natural-gradient descent trajectories with a visible-space reference flow.

Explicit Euler throughout.  Two integrator modes, chosen by the model:

* ambient (model "full") -- the state is the joint distribution itself and
  the update p <- p - step * grad is a convex combination for step < 1, so
  positivity cannot be lost; violating that (step >= 1) raises StepTooLarge.
* parametric (product / tied / bayesnet models) -- theta <- theta minus
  step times the natural parameter gradient.

Alongside either flow runs the visible reference flow
ref <- ref - step * (ref - pstar) started at the marginal of the initial
point.  In ambient mode the marginal of the state reproduces the reference
exactly (marginalization is linear and commutes with the update); in
parametric mode the marginal drifts at first order in the step size.

Per-iteration rows describe the state after that iteration's update.  The
gradient is computed once per iteration: it is logged at the post-update
state and reused as the next update direction.

Objectives: "elbo" and "dq" share the gradient field (the expected ELBO is
-D(q || .) up to a constant), with q fixed at initialization; "dist_to_Q"
re-projects every step (the divergence-from-data-manifold flow);
"kl_visible" runs directly on the visible simplex (no hidden units; only
the ambient/"full" integrator applies, and elbo_expected is logged as nan).

The wall_time_s column is 0.0 unless timings are requested, keeping CSV
output byte-reproducible by default; with timings on, ambient rows carry
the mean per-iteration time of the kernel loop.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .. import backend as K
from ..bayesnet import BayesNetModel, block_natural_gradient, load_bayesnet, to_model
from ..errors import ConfigError, RangeMismatch, StepTooLarge
from ..fibration import JointSpace, joint_space, marginalize_v, project_to_data_manifold
from ..model import (
    ParametricModel,
    full_simplex_model,
    jacobian_matrix,
    log_odds,
    natural_param_gradient,
    product_log_odds,
    product_model,
    pushforward_invariance_gap,
    tied_model,
    tied_visible_model,
)
from ..rng import default_rng, random_distribution
from ..simplex import Distribution, StateSpace
from .config import BAYESNET_PREFIX, ExperimentConfig

CSV_HEADER = "iter,kl_visible,elbo_expected,grad_norm,invariance_gap,wall_time_s"
# Scale of the seeded initial parameter draw for the tied curve.
TIED_THETA_SCALE = 0.5


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Per-iteration logs plus the final state of one descent run."""

    config: ExperimentConfig
    iterations: np.ndarray
    kl_visible: np.ndarray
    elbo_expected: np.ndarray
    grad_norm: np.ndarray
    invariance_gap: np.ndarray
    wall_time_s: np.ndarray
    marginal_deviation: np.ndarray
    pstar: Distribution
    q: Distribution | None
    final_state: Distribution
    final_marginal: Distribution


def format_float(x: float) -> str:
    return f"{x:.17g}"


def trajectory_csv(record: TrajectoryRecord) -> str:
    """Fixed-schema CSV text: 17 significant digits, header always present."""
    lines = [CSV_HEADER]
    for k in range(record.iterations.shape[0]):
        lines.append(
            ",".join(
                [
                    str(int(record.iterations[k])),
                    format_float(record.kl_visible[k]),
                    format_float(record.elbo_expected[k]),
                    format_float(record.grad_norm[k]),
                    format_float(record.invariance_gap[k]),
                    format_float(record.wall_time_s[k]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_trajectory_csv(record: TrajectoryRecord, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trajectory_csv(record))


def _target_distribution(cfg: ExperimentConfig, space, rng) -> Distribution:
    if isinstance(cfg.target, str):
        return random_distribution(space, rng)
    vec = np.asarray(cfg.target, dtype=np.float64)
    if vec.shape != (space.size,):
        raise ConfigError(
            f"target has {vec.size} entries, visible space has {space.size}"
        )
    return Distribution(space, vec / vec.sum())


def _recognition(cfg: ExperimentConfig, js: JointSpace, p0: Distribution, pstar):
    """The fixed q for the elbo/dq objectives."""
    if isinstance(cfg.q_init, str):
        return project_to_data_manifold(js, p0, pstar)
    vec = np.asarray(cfg.q_init, dtype=np.float64)
    if vec.shape != (js.joint.size,):
        raise ConfigError(
            f"q_init has {vec.size} entries, joint space has {js.joint.size}"
        )
    q = Distribution(js.joint, vec / vec.sum())
    gap = float(np.max(np.abs(marginalize_v(js, q).probs - pstar.probs)))
    if gap > 1e-10:
        raise ConfigError(
            f"q_init marginal is {gap:.3e} away from the target; "
            f"q must lie on the data manifold"
        )
    return q


def _visible_flow(cfg: ExperimentConfig) -> TrajectoryRecord:
    """kl_visible objective: descent on the visible simplex itself."""
    if cfg.model != "full":
        raise ConfigError(
            "objective 'kl_visible' has no hidden units and runs on the "
            "visible simplex only; use model 'full' (for joint models use "
            "objective 'dist_to_Q', its pullback)"
        )
    rng = default_rng(cfg.seed)
    space = StateSpace(cfg.nv)
    pstar = _target_distribution(cfg, space, rng)
    p = random_distribution(space, rng).probs.copy()
    n = cfg.iters

    kl = np.zeros(n)
    gnorm = np.zeros(n)
    g = p - pstar.probs
    for t in range(n):
        pnew = p - cfg.step * g
        if np.any(pnew <= 0.0):
            raise StepTooLarge(
                f"visible iterate left the simplex at iteration {t + 1}; "
                f"step {cfg.step} is too large"
            )
        p = pnew
        g = p - pstar.probs
        kl[t] = float(np.sum(pstar.probs * np.log(pstar.probs / p)))
        gnorm[t] = float(np.sqrt(np.sum(g * g / p)))

    final = Distribution(space, p)
    return TrajectoryRecord(
        config=cfg,
        iterations=np.arange(1, n + 1),
        kl_visible=kl,
        elbo_expected=np.full(n, np.nan),
        grad_norm=gnorm,
        invariance_gap=np.zeros(n),
        wall_time_s=np.zeros(n),
        marginal_deviation=np.zeros(n),
        pstar=pstar,
        q=None,
        final_state=final,
        final_marginal=final,
    )


def _ambient_flow(cfg: ExperimentConfig, timings: bool) -> TrajectoryRecord:
    rng = default_rng(cfg.seed)
    js = joint_space(cfg.nv, cfg.nh)
    pstar = _target_distribution(cfg, js.visible, rng)
    p0 = random_distribution(js.joint, rng)
    reproject = cfg.objective == "dist_to_Q"
    if reproject:
        q = None
        q_probs = np.zeros(0)
    else:
        q = _recognition(cfg, js, p0, pstar)
        q_probs = q.probs

    started = time.perf_counter()
    bad_iter, p, _ref, kl, elbo, gnorm, igap, mdev = K.ambient_descent(
        p0.probs, pstar.probs, q_probs, cfg.step, cfg.iters, reproject
    )
    elapsed = time.perf_counter() - started
    if bad_iter >= 0:
        raise StepTooLarge(
            f"joint iterate left the simplex at iteration {bad_iter}; "
            f"ambient mode needs step < 1 (got {cfg.step})"
        )

    wall = np.zeros(cfg.iters)
    if timings:
        wall[:] = elapsed / cfg.iters
    final = Distribution(js.joint, p)
    return TrajectoryRecord(
        config=cfg,
        iterations=np.arange(1, cfg.iters + 1),
        kl_visible=kl,
        elbo_expected=elbo,
        grad_norm=gnorm,
        invariance_gap=igap,
        wall_time_s=wall,
        marginal_deviation=mdev,
        pstar=pstar,
        q=q,
        final_state=final,
        final_marginal=marginalize_v(js, final),
    )


def _parametric_setup(cfg: ExperimentConfig, rng):
    """Model pair, initial parameters, and the visible-chart map."""
    if cfg.model == "product":
        js = joint_space(cfg.nv, cfg.nh)
        pstar = _target_distribution(cfg, js.visible, rng)
        m = product_model(js)
        theta0 = product_log_odds(js, random_distribution(js.joint, rng))
        m_vis = full_simplex_model(js.visible)
        theta_vis = None  # chart of the current marginal
        bn = None
    elif cfg.model == "tied":
        js = joint_space(cfg.nv, cfg.nh)
        pstar = _target_distribution(cfg, js.visible, rng)
        a = rng.standard_normal(cfg.nv)
        b = rng.standard_normal((cfg.nv, cfg.nh))
        m = tied_model(js, a, b)
        theta0 = np.array([TIED_THETA_SCALE * rng.standard_normal()])
        m_vis = tied_visible_model(js.visible, a)
        theta_vis = "same"  # the visible factor shares theta
        bn = None
    else:
        bn, theta0 = load_bayesnet(cfg.model[len(BAYESNET_PREFIX) :])
        if bn.joint_space is None:
            raise ConfigError(
                "training needs a network with both visible and hidden nodes"
            )
        js = bn.joint_space
        pstar = _target_distribution(cfg, js.visible, rng)
        m = to_model(bn)
        m_vis = full_simplex_model(js.visible)
        theta_vis = None
    return js, pstar, m, m_vis, theta_vis, theta0, bn


def _parametric_flow(cfg: ExperimentConfig, timings: bool) -> TrajectoryRecord:
    rng = default_rng(cfg.seed)
    js, pstar, m, m_vis, theta_vis_rule, theta, bn = _parametric_setup(cfg, rng)
    reproject = cfg.objective == "dist_to_Q"
    p = m.eval(theta)
    q = None if reproject else _recognition(cfg, js, p, pstar)
    gap_mode = "dist_to_q" if reproject else "fixed_q"
    gap_arg = pstar if reproject else q

    def param_grad(point: Distribution, jac: np.ndarray) -> np.ndarray:
        if reproject:
            ambient = point.probs - project_to_data_manifold(js, point, pstar).probs
        else:
            ambient = point.probs - q.probs
        return jac.T @ (ambient / point.probs)

    def solve(grad: np.ndarray) -> np.ndarray:
        if bn is not None:
            return block_natural_gradient(bn, theta, grad)
        return natural_param_gradient(m, theta, grad)

    n = cfg.iters
    kl = np.zeros(n)
    elbo = np.zeros(n)
    gnorm = np.zeros(n)
    igap = np.zeros(n)
    mdev = np.zeros(n)
    wall = np.zeros(n)

    ref = marginalize_v(js, p).probs.copy()
    g = param_grad(p, jacobian_matrix(m, theta))
    u = solve(g)
    for t in range(n):
        tick = time.perf_counter() if timings else 0.0
        theta = theta - cfg.step * u
        ref = ref - cfg.step * (ref - pstar.probs)
        p = m.eval(theta)
        g = param_grad(p, jacobian_matrix(m, theta))
        u = solve(g)
        pv = marginalize_v(js, p)
        kl[t] = float(np.sum(pstar.probs * np.log(pstar.probs / pv.probs)))
        if reproject:
            elbo[t] = float(np.sum(pstar.probs * np.log(pv.probs)))
        else:
            elbo[t] = K.elbo_sum(q.probs, p.probs, js.nv, js.nh)
        gnorm[t] = float(np.sqrt(max(float(u @ g), 0.0)))
        tv = theta if theta_vis_rule == "same" else log_odds(pv)
        try:
            igap[t] = pushforward_invariance_gap(
                m, m_vis, theta, tv, gap_arg, mode=gap_mode
            )
        except RangeMismatch:
            igap[t] = np.nan
        mdev[t] = float(np.max(np.abs(pv.probs - ref)))
        if timings:
            wall[t] = time.perf_counter() - tick

    return TrajectoryRecord(
        config=cfg,
        iterations=np.arange(1, n + 1),
        kl_visible=kl,
        elbo_expected=elbo,
        grad_norm=gnorm,
        invariance_gap=igap,
        wall_time_s=wall,
        marginal_deviation=mdev,
        pstar=pstar,
        q=q,
        final_state=m.eval(theta),
        final_marginal=marginalize_v(js, m.eval(theta)),
    )


def run_trajectory(
    cfg: ExperimentConfig, out_path=None, *, timings: bool = False
) -> TrajectoryRecord:
    """Run one descent per the config; optionally write the CSV log."""
    if cfg.objective == "kl_visible":
        record = _visible_flow(cfg)
    elif cfg.model == "full":
        record = _ambient_flow(cfg, timings)
    else:
        record = _parametric_flow(cfg, timings)
    if out_path is not None:
        write_trajectory_csv(record, out_path)
    return record
