"""Seeded verification battery for the gradient and invariance identities.

Each item measures one quantity (a worst-case gap or relative error over a
fixed number of seeded draws) and compares it against a threshold.  Three
item kinds exist:

* ``below`` -- passes when the measured value is at or under the threshold;
* ``above`` -- a counterexample item: passes when the value *exceeds* the
  threshold, confirming that an identity genuinely fails off its
  hypotheses (the tied model is the built-in example);
* ``flag``  -- a boolean property; value 1.0 means it held on every draw.

The battery always contains the oracle cross-checks of the closed-form
gradients and the constant-offset identity linking the expected ELBO to
D(q || .); the pushforward-gap items depend on the configured model, and
Bayes-net configs add the cross-node orthogonality and block-solve items.
All draws come from one generator seeded by the config, so reports and
their CSV form are byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bayesnet import (
    block_natural_gradient,
    load_bayesnet,
    orthogonality_audit,
    to_model,
)
from ..errors import RangeMismatch
from ..fibration import (
    conditional_h_given_v,
    joint_space,
    marginalize_v,
    nat_grad_dist_to_Q,
    project_to_data_manifold,
)
from ..model import (
    cylindricity_check,
    fisher_matrix,
    full_simplex_model,
    log_odds,
    natural_param_gradient,
    product_log_odds,
    product_model,
    pushforward_invariance_gap,
    random_tied_pair,
)
from ..objectives import ObjectiveContext, elbo_expected, target_log_mass
from ..oracle import fd_natural_gradient
from ..rng import default_rng, random_distribution, tempered_distribution
from ..simplex import Distribution, TangentVector, kl_divergence
from .config import BAYESNET_PREFIX, ExperimentConfig
from .trajectory import format_float

# Draws per suite item; the per-criterion test batteries use larger counts.
N_DRAWS = 10
# Exact-identity and oracle thresholds (the config tol governs gap items).
IDENTITY_TOL = 1e-12
ORACLE_TOL = 1e-6
AUDIT_TOL = 1e-12
BLOCK_SOLVE_TOL = 1e-10

CSV_HEADER = "item,kind,value,tol,status"


@dataclass(frozen=True)
class SuiteItem:
    name: str
    kind: str  # "below" | "above" | "flag"
    value: float
    tol: float
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        if self.kind == "above":
            return "confirmed" if self.passed else "fail"
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class SuiteReport:
    config: ExperimentConfig
    items: tuple[SuiteItem, ...]

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)


def _below(name: str, value: float, tol: float, detail: str = "") -> SuiteItem:
    return SuiteItem(name, "below", value, tol, value <= tol, detail)


def _above(name: str, value: float, tol: float, detail: str = "") -> SuiteItem:
    return SuiteItem(name, "above", value, tol, value > tol, detail)


def _flag(name: str, ok: bool, detail: str = "") -> SuiteItem:
    return SuiteItem(name, "flag", 1.0 if ok else 0.0, 1.0, ok, detail)


def _rel_error(closed: np.ndarray, approx: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(closed))), 1e-300)
    return float(np.max(np.abs(closed - approx))) / scale


def _oracle_items(cfg: ExperimentConfig, rng) -> list[SuiteItem]:
    js = joint_space(cfg.nv, cfg.nh)
    worst_q = 0.0
    worst_dq = 0.0
    worst_elbo = 0.0
    worst_offset = 0.0
    # Tempered draws: central differences at h = 1e-5 need points away
    # from the simplex boundary to meet the 1e-6 oracle tolerance.
    for _ in range(N_DRAWS):
        pstar = tempered_distribution(js.visible, rng)
        p = tempered_distribution(js.joint, rng)
        q = project_to_data_manifold(js, tempered_distribution(js.joint, rng), pstar)
        ctx = ObjectiveContext(js, pstar, q)

        closed = nat_grad_dist_to_Q(js, p, pstar)
        fd = fd_natural_gradient(
            lambda d: kl_divergence(pstar, marginalize_v(js, d)), p
        )
        worst_q = max(worst_q, _rel_error(closed.coords, fd.coords))

        closed_dq = p.probs - q.probs
        fd_dq = fd_natural_gradient(lambda d: kl_divergence(q, d), p)
        worst_dq = max(worst_dq, _rel_error(closed_dq, fd_dq.coords))

        closed_elbo = q.probs - p.probs
        fd_elbo = fd_natural_gradient(lambda d: elbo_expected(ctx, d), p)
        worst_elbo = max(worst_elbo, _rel_error(closed_elbo, fd_elbo.coords))

        offset = abs(
            elbo_expected(ctx, p) + kl_divergence(q, p) - target_log_mass(ctx)
        )
        worst_offset = max(worst_offset, offset)
    return [
        _below(
            "data-manifold divergence gradient vs finite-difference oracle",
            worst_q,
            ORACLE_TOL,
        ),
        _below(
            "fixed-q divergence gradient vs finite-difference oracle",
            worst_dq,
            ORACLE_TOL,
        ),
        _below(
            "expected-ELBO gradient vs finite-difference oracle",
            worst_elbo,
            ORACLE_TOL,
        ),
        _below(
            "ELBO + D(q||p) constant-offset identity",
            worst_offset,
            IDENTITY_TOL,
        ),
    ]


def _full_or_product_items(cfg: ExperimentConfig, rng) -> list[SuiteItem]:
    js = joint_space(cfg.nv, cfg.nh)
    m_vis = full_simplex_model(js.visible)
    if cfg.model == "full":
        m = full_simplex_model(js.joint, joint_space=js)
        chart = log_odds
    else:
        m = product_model(js)
        chart = lambda p: product_log_odds(js, p)  # noqa: E731

    worst = {"pullback": 0.0, "dist_to_q": 0.0, "fixed_q": 0.0}
    for _ in range(N_DRAWS):
        p0 = random_distribution(js.joint, rng)
        theta = chart(p0)
        theta_vis = log_odds(marginalize_v(js, m.eval(theta)))
        pstar = random_distribution(js.visible, rng)
        q = random_distribution(js.joint, rng)

        def kl_grad(pv: Distribution) -> TangentVector:
            return TangentVector(js.visible, pv.probs - pstar.probs, base=pv)

        for mode, arg in (
            ("pullback", kl_grad),
            ("dist_to_q", pstar),
            ("fixed_q", q),
        ):
            gap = pushforward_invariance_gap(m, m_vis, theta, theta_vis, arg, mode=mode)
            worst[mode] = max(worst[mode], gap)

    report = cylindricity_check(m, chart(random_distribution(js.joint, rng)))
    label = cfg.model
    return [
        _below(f"{label} model: pullback-objective pushforward gap", worst["pullback"], cfg.tol),
        _below(
            f"{label} model: data-manifold divergence pushforward gap",
            worst["dist_to_q"],
            cfg.tol,
        ),
        _below(f"{label} model: fixed-q divergence pushforward gap", worst["fixed_q"], cfg.tol),
        _flag(
            f"{label} model splits into horizontal and vertical parts",
            report.is_cylindrical,
            detail=(
                f"dim {report.dim_tangent} = {report.dim_h_intersection} horizontal "
                f"+ {report.dim_v_intersection} vertical"
            ),
        ),
    ]


def _tied_items(cfg: ExperimentConfig, rng) -> list[SuiteItem]:
    js = joint_space(cfg.nv, cfg.nh)
    worst_gap = 0.0
    all_non_cylindrical = True
    for _ in range(N_DRAWS):
        m, m_vis = random_tied_pair(js, rng)
        theta = np.array([0.5 * rng.standard_normal()])
        q = random_distribution(js.joint, rng)
        gap = pushforward_invariance_gap(m, m_vis, theta, theta, q, mode="fixed_q")
        worst_gap = max(worst_gap, gap)
        report = cylindricity_check(m, theta)
        all_non_cylindrical = all_non_cylindrical and not report.is_cylindrical
    return [
        _above(
            "tied model: fixed-q pushforward gap (counterexample, expected to exceed tol)",
            worst_gap,
            cfg.tol,
        ),
        _flag(
            "tied model is nowhere cylindrical on the tested draws",
            all_non_cylindrical,
        ),
    ]


def _bayesnet_items(cfg: ExperimentConfig, rng) -> list[SuiteItem]:
    bn, _theta0 = load_bayesnet(cfg.model[len(BAYESNET_PREFIX) :])
    m = to_model(bn)
    worst_audit = 0.0
    worst_solve = 0.0
    for _ in range(N_DRAWS):
        theta = 0.7 * rng.standard_normal(bn.dim)
        gram = fisher_matrix(m, theta).entries
        cross = orthogonality_audit(bn, theta)
        worst_audit = max(worst_audit, cross / float(np.max(np.diag(gram))))
        grad = rng.standard_normal(bn.dim)
        dense = natural_param_gradient(m, theta, grad)
        block = block_natural_gradient(bn, theta, grad)
        worst_solve = max(worst_solve, _rel_error(dense, block))
    items = [
        _below(
            "cross-node Fisher entries relative to the diagonal",
            worst_audit,
            AUDIT_TOL,
        ),
        _below(
            "block-diagonal natural-gradient solve vs dense solve",
            worst_solve,
            BLOCK_SOLVE_TOL,
        ),
    ]
    if bn.joint_space is not None:
        js = bn.joint_space
        m_vis = full_simplex_model(js.visible)
        worst_gap = 0.0
        applicable = True
        for _ in range(N_DRAWS):
            theta = 0.7 * rng.standard_normal(bn.dim)
            q = random_distribution(js.joint, rng)
            theta_vis = log_odds(marginalize_v(js, m.eval(theta)))
            try:
                gap = pushforward_invariance_gap(
                    m, m_vis, theta, theta_vis, q, mode="fixed_q"
                )
            except RangeMismatch:
                applicable = False
                break
            worst_gap = max(worst_gap, gap)
        if applicable:
            items.append(
                _below(
                    "network: fixed-q divergence pushforward gap",
                    worst_gap,
                    cfg.tol,
                )
            )
    return items


def run_invariance_suite(cfg: ExperimentConfig) -> SuiteReport:
    """Execute the battery selected by the config's model."""
    rng = default_rng(cfg.seed)
    items = _oracle_items(cfg, rng)
    if cfg.model in ("full", "product"):
        items += _full_or_product_items(cfg, rng)
    elif cfg.model == "tied":
        items += _tied_items(cfg, rng)
    else:
        items += _bayesnet_items(cfg, rng)
    return SuiteReport(config=cfg, items=tuple(items))


def report_lines(report: SuiteReport) -> list[str]:
    lines = []
    for item in report.items:
        mark = "ok " if item.passed else "FAIL"
        rel = ">" if item.kind == "above" else "<="
        line = (
            f"[{mark}] {item.name}: value={item.value:.3e} "
            f"(want {rel} {item.tol:.1e})"
        )
        if item.detail:
            line += f" -- {item.detail}"
        lines.append(line)
    n_fail = sum(not item.passed for item in report.items)
    if n_fail:
        lines.append(f"{n_fail} of {len(report.items)} items failed")
    else:
        lines.append(f"all {len(report.items)} items passed")
    return lines


def suite_csv(report: SuiteReport) -> str:
    """Fixed-schema CSV of the report (17 significant digits)."""
    lines = [CSV_HEADER]
    for item in report.items:
        lines.append(
            ",".join(
                [
                    f'"{item.name}"',
                    item.kind,
                    format_float(item.value),
                    format_float(item.tol),
                    item.status,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_suite_csv(report: SuiteReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(suite_csv(report))
