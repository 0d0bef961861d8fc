"""Compare the compiled and pure-Python kernel backends.

Times a full ``ssr-bedpp`` lasso path and a group-lasso path under each
available backend on the same synthetic data, and checks that both
backends return the same coefficients.

    python benchmarks/bench_kernels.py --n 500 --p 5000 --reps 3
"""

import argparse
import time

import numpy as np
from threadpoolctl import threadpool_limits

from sparsepath import (
    available_backends,
    compute_lambda_max,
    group_standardize,
    make_lambda_path,
    solve_path,
    standardize,
    use_backend,
)
from sparsepath.synth import GroupSynthSpec, SynthSpec, generate


def time_path(design, strategy, K, reps):
    path = make_lambda_path(compute_lambda_max(design), K)
    best, coefs = np.inf, None
    for _ in range(reps):
        t0 = time.perf_counter()
        sol, _ = solve_path(design, path, strategy)
        best = min(best, time.perf_counter() - t0)
        coefs = sol.coefs
    return best, coefs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--p", type=int, default=5000)
    ap.add_argument("--W", type=int, default=10)
    ap.add_argument("--k", type=int, default=99)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    X, y, _ = generate(SynthSpec(n=args.n, p=args.p, seed=args.seed))
    lasso = standardize(X, y)
    gspec = GroupSynthSpec(n=args.n, G=args.p // args.W, W=args.W, seed=args.seed)
    Xg, yg, _ = generate(gspec)
    group = group_standardize(Xg, yg, gspec.groups())

    cases = [("lasso", lasso, "ssr-bedpp"), ("lasso", lasso, "none"),
             ("group", group, "ssr-bedpp"), ("group", group, "none")]
    print(f"n={args.n} p={args.p} K={args.k} best of {args.reps}")
    print(f"{'problem':>8} {'strategy':>10} " + " ".join(f"{b:>10}" for b in available_backends())
          + f" {'ratio':>7} {'max|diff|':>10}")
    with threadpool_limits(limits=1):
        for name, design, strategy in cases:
            times, coefs = {}, {}
            for b in available_backends():
                with use_backend(b):
                    times[b], coefs[b] = time_path(design, strategy, args.k, args.reps)
            row = " ".join(f"{times[b]:10.3f}" for b in available_backends())
            if len(times) == 2:
                ratio = times["python"] / times["compiled"]
                diff = float(np.max(np.abs(coefs["python"] - coefs["compiled"])))
                row += f" {ratio:7.1f} {diff:10.2e}"
            print(f"{name:>8} {strategy:>10} {row}")


if __name__ == "__main__":
    main()
