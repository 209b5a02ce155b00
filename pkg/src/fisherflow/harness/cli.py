"""Command-line front end.

Subcommands:

* ``check``    -- run the invariance suite; exit 0 when every item passes
  (counterexample items pass by *exceeding* their threshold).
* ``train``    -- run one natural-gradient descent and write the CSV log.
* ``cylinder`` -- print the horizontal/vertical splitting report for a
  model at a given or seeded parameter vector.
* ``bayesnet`` -- cross-node orthogonality audit and block-vs-dense solve
  comparison for a network (a built-in two-node chain by default).

Settings come from defaults, then ``--config`` (JSON with the experiment
fields as keys), then flags.  Exit codes: 0 all checks passed, 1 a check
failed or a run aborted, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..bayesnet import (
    block_natural_gradient,
    load_bayesnet,
    orthogonality_audit,
    to_model,
    vh_chain_model,
)
from ..errors import ConfigError, GeometryError
from ..fibration import joint_space
from ..model import (
    cylindricity_check,
    full_simplex_model,
    natural_param_gradient,
    product_model,
    random_tied_pair,
)
from ..rng import default_rng
from .config import BAYESNET_PREFIX, ExperimentConfig, build_config
from .suite import (
    AUDIT_TOL,
    BLOCK_SOLVE_TOL,
    report_lines,
    run_invariance_suite,
    write_suite_csv,
)
from .trajectory import run_trajectory


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fisherflow",
        description="Natural-gradient geometry checks and descent runs "
        "on finite state spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="random seed (64-bit integer)")
        p.add_argument("--tol", type=float, help="pass/fail threshold for gap items")
        p.add_argument("--model", help="full | product | tied | bayesnet:<file>")
        p.add_argument(
            "--objective", help="kl_visible | dist_to_Q | dq | elbo"
        )
        p.add_argument("--steps", type=int, help="iteration count")
        p.add_argument("--step-size", type=float, help="Euler step size")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--nv", type=int, help="visible state count")
        p.add_argument("--nh", type=int, help="hidden state count")
        p.add_argument(
            "--quiet", action="store_true", help="suppress per-item output"
        )

    check = sub.add_parser("check", help="run the invariance suite")
    add_common(check)

    train = sub.add_parser("train", help="run natural-gradient descent")
    add_common(train)
    train.add_argument(
        "--timings",
        action="store_true",
        help="record real wall times in the CSV (off by default so output "
        "is byte-reproducible)",
    )

    cylinder = sub.add_parser(
        "cylinder", help="horizontal/vertical splitting report for a model"
    )
    add_common(cylinder)
    cylinder.add_argument(
        "--theta",
        help="comma-separated parameter vector (default: a seeded draw)",
    )

    bayesnet = sub.add_parser(
        "bayesnet", help="orthogonality audit and block-solve comparison"
    )
    add_common(bayesnet)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    pairs = {
        "seed": args.seed,
        "tol": args.tol,
        "model": args.model,
        "objective": args.objective,
        "iters": args.steps,
        "step": args.step_size,
        "nv": args.nv,
        "nh": args.nh,
    }
    return {k: v for k, v in pairs.items() if v is not None}


def _emit(quiet: bool, *lines: str) -> None:
    if not quiet:
        for line in lines:
            print(line)


def _cmd_check(args, cfg: ExperimentConfig) -> int:
    report = run_invariance_suite(cfg)
    _emit(args.quiet, *report_lines(report))
    if args.out:
        write_suite_csv(report, args.out)
    return 0 if report.passed else 1


def _cmd_train(args, cfg: ExperimentConfig) -> int:
    record = run_trajectory(cfg, out_path=args.out, timings=args.timings)
    final_kl = float(record.kl_visible[-1])
    _emit(
        args.quiet,
        f"{cfg.iters} iterations of {cfg.objective} descent on model "
        f"'{cfg.model}' (step {cfg.step}, seed {cfg.seed})",
        f"final visible KL to target: {final_kl:.6e}",
        f"max marginal deviation from the reference flow: "
        f"{float(np.max(record.marginal_deviation)):.6e}",
    )
    if args.out:
        _emit(args.quiet, f"wrote {cfg.iters} rows to {args.out}")
    return 0


def _cylinder_target(cfg: ExperimentConfig):
    """Model and seeded default parameters for the cylinder subcommand."""
    rng = default_rng(cfg.seed)
    if cfg.model.startswith(BAYESNET_PREFIX):
        bn, theta0 = load_bayesnet(cfg.model[len(BAYESNET_PREFIX) :])
        if bn.joint_space is None:
            raise ConfigError(
                "the splitting report needs a network with visible and "
                "hidden nodes"
            )
        return to_model(bn), theta0
    js = joint_space(cfg.nv, cfg.nh)
    if cfg.model == "full":
        m = full_simplex_model(js.joint, joint_space=js)
    elif cfg.model == "product":
        m = product_model(js)
    else:
        m, _ = random_tied_pair(js, rng)
    return m, 0.5 * rng.standard_normal(m.dim)


def _cmd_cylinder(args, cfg: ExperimentConfig) -> int:
    m, theta = _cylinder_target(cfg)
    if args.theta is not None:
        try:
            theta = np.array([float(x) for x in args.theta.split(",")])
        except ValueError as exc:
            raise ConfigError(f"--theta is not a number list: {exc}") from exc
        if theta.shape != (m.dim,):
            raise ConfigError(
                f"--theta has {theta.size} entries, model "
                f"'{cfg.model}' needs {m.dim}"
            )
    report = cylindricity_check(m, theta)
    verdict = "cylindrical" if report.is_cylindrical else "NOT cylindrical"
    _emit(
        args.quiet,
        f"model '{cfg.model}' at theta of length {len(np.atleast_1d(theta))}:",
        f"  tangent dimension:          {report.dim_tangent}",
        f"  horizontal intersection:    {report.dim_h_intersection}",
        f"  vertical intersection:      {report.dim_v_intersection}",
        f"  smallest retained singular: {report.residual:.3e}",
        f"  verdict: {verdict}",
    )
    return 0


def _cmd_bayesnet(args, cfg: ExperimentConfig) -> int:
    if cfg.model.startswith(BAYESNET_PREFIX):
        bn, _ = load_bayesnet(cfg.model[len(BAYESNET_PREFIX) :])
        label = cfg.model
    else:
        bn = vh_chain_model(cfg.nv, cfg.nh)
        label = f"built-in chain V({cfg.nv}) -> H({cfg.nh})"
    rng = default_rng(cfg.seed)
    m = to_model(bn)
    worst_audit = 0.0
    worst_solve = 0.0
    draws = 10
    for _ in range(draws):
        theta = 0.7 * rng.standard_normal(bn.dim)
        worst_audit = max(worst_audit, orthogonality_audit(bn, theta))
        grad = rng.standard_normal(bn.dim)
        dense = natural_param_gradient(m, theta, grad)
        block = block_natural_gradient(bn, theta, grad)
        scale = max(float(np.max(np.abs(dense))), 1e-300)
        worst_solve = max(worst_solve, float(np.max(np.abs(dense - block))) / scale)
    ok = worst_audit <= AUDIT_TOL and worst_solve <= BLOCK_SOLVE_TOL
    _emit(
        args.quiet,
        f"{label}: {bn.dag.n_nodes} nodes, {bn.dim} parameters, {draws} draws",
        f"  max cross-node Fisher entry (relative): {worst_audit:.3e} "
        f"(tol {AUDIT_TOL:.1e})",
        f"  max block-vs-dense solve difference:    {worst_solve:.3e} "
        f"(tol {BLOCK_SOLVE_TOL:.1e})",
        "  ok" if ok else "  FAIL",
    )
    return 0 if ok else 1


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = build_config(args.config, _overrides(args))
        if args.command == "check":
            return _cmd_check(args, cfg)
        if args.command == "train":
            return _cmd_train(args, cfg)
        if args.command == "cylinder":
            return _cmd_cylinder(args, cfg)
        return _cmd_bayesnet(args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
