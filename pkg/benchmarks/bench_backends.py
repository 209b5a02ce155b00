#!/usr/bin/env python3
"""Timing and agreement comparison between the compiled kernels and the
numpy reference.

Runs each kernel on both backends, reports the speedup and the largest
numerical deviation.  The packaged selection logic is environment-driven
(FISHERFLOW_BACKEND=python forces the reference); here both modules are
imported directly so a single process can race them against each other.

Usage:
    python3 benchmarks/bench_backends.py [--iters 2000] [--nv 40] [--nh 50]
"""

import argparse
import time

import numpy as np

from fisherflow.backend import _ref

try:
    from fisherflow.backend import _fastcore
except ImportError:
    _fastcore = None


def _time(fn, *args, repeat=5):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _max_dev(a, b):
    if isinstance(a, tuple):
        return max(_max_dev(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a, dtype=np.float64)
                               - np.asarray(b, dtype=np.float64))))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iters", type=int, default=2000,
                    help="descent iterations (default 2000)")
    ap.add_argument("--nv", type=int, default=40)
    ap.add_argument("--nh", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _fastcore is None:
        print("compiled backend not available; nothing to compare")
        return

    rng = np.random.default_rng(args.seed)
    n = args.nv * args.nh
    p = rng.exponential(size=n) + 0.05
    p /= p.sum()
    q = rng.exponential(size=n) + 0.05
    q /= q.sum()
    a = rng.normal(size=n)
    a -= a.mean()
    b = rng.normal(size=n)
    b -= b.mean()
    pstar = rng.exponential(size=args.nv) + 0.1
    pstar /= pstar.sum()
    cond = _ref.conditional_rows(q, args.nv, args.nh)
    q_manifold = _ref.horizontal_lift(cond, pstar)

    cases = [
        ("fisher_inner", (p, a, b)),
        ("kl_div", (q, p)),
        ("xlogx_sum", (p,)),
        ("row_sums", (a, args.nv, args.nh)),
        ("conditional_rows", (p, args.nv, args.nh)),
        ("horizontal_lift", (cond, pstar)),
        ("elbo_sum", (q, p, args.nv, args.nh)),
        ("ambient_descent",
         (p, pstar, q_manifold, 0.02, args.iters, False)),
        ("ambient_descent (reproject)",
         (p, pstar, q_manifold, 0.02, args.iters, True)),
    ]

    print(f"joint size {args.nv}x{args.nh} = {n}, "
          f"{args.iters} descent iterations\n")
    print(f"{'kernel':<28} {'python':>10} {'c':>10} "
          f"{'speedup':>8} {'max dev':>10}")
    for label, call_args in cases:
        name = label.split(" ")[0]
        t_ref, out_ref = _time(getattr(_ref, name), *call_args)
        t_fast, out_fast = _time(getattr(_fastcore, name), *call_args)
        dev = _max_dev(out_ref, out_fast)
        print(f"{label:<28} {t_ref * 1e3:>8.3f}ms {t_fast * 1e3:>8.3f}ms "
              f"{t_ref / t_fast:>7.1f}x {dev:>10.2e}")


if __name__ == "__main__":
    main()
