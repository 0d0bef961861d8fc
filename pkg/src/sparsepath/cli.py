"""Command-line entry point: ``sparsepath {solve,bench,gen}``.

Exit codes: 0 on success, 1 when the run itself fails (bad data, solver
abort, I/O), 2 on usage errors. ``SPARSEPATH_THREADS`` caps the BLAS
thread pool for ``solve``; ``bench`` always times single-threaded.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import _kernels
from .bench import case_spec, run_benchmark
from .design import compute_lambda_max, group_standardize, make_lambda_path, standardize
from .errors import SparsePathError
from .io import load_groups, load_vector, read_csv_matrix, write_matrix, write_rows
from .path import Strategy, solve_path
from .solver import Problem, SolveConfig
from .synth import GroupSynthSpec, SynthSpec, generate

THREADS_ENV = "SPARSEPATH_THREADS"


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _ratio(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return v


def _alpha(text):
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1], got {text}")
    return v


def _strategy(text):
    try:
        return Strategy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _strategy_list(text):
    return [_strategy(s) for s in text.split(",") if s.strip()]


def _add_path_args(p):
    p.add_argument("--k", type=_positive_int, default=99,
                   help="number of grid intervals; the path has K+1 lambda values (default 99)")
    p.add_argument("--ratio-min", type=_ratio, default=0.1,
                   help="smallest lambda as a fraction of lambda_max (default 0.1)")
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p.add_argument("--tol", type=_positive_float, default=1e-7,
                   help="convergence tolerance on max coefficient change (default 1e-7)")
    p.add_argument("--max-iter", type=_positive_int, default=10000)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparsepath",
        description="Lasso, elastic-net and group-lasso paths with hybrid safe-strong screening.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one regularization path from CSV input")
    s.add_argument("--x", required=True, type=Path, help="design matrix CSV, rows = observations")
    s.add_argument("--y", required=True, type=Path, help="response CSV, one value per row")
    s.add_argument("--groups", type=Path, help="group label per feature, one per line")
    s.add_argument("--problem", choices=("lasso", "enet", "group"))
    s.add_argument("--alpha", type=_alpha, default=1.0, help="elastic-net mixing parameter")
    s.add_argument("--strategy", type=_strategy, default=Strategy.SSR_BEDPP)
    _add_path_args(s)
    s.add_argument("--out", type=Path, required=True, help="coefficient CSV to write")
    s.add_argument("--diagnostics", type=Path, help="per-lambda diagnostics CSV to write")
    s.add_argument("--scale", choices=("standardized", "original"), default="standardized",
                   help="report coefficients on standardized or raw feature scale")

    b = sub.add_parser("bench", help="time screening strategies over replications")
    b.add_argument("--case", choices=("vary-p", "vary-n", "group"), default="vary-p")
    b.add_argument("--x", type=Path, help="time on this design instead of synthetic data")
    b.add_argument("--y", type=Path)
    b.add_argument("--groups", type=Path)
    b.add_argument("--n", type=_positive_int)
    b.add_argument("--p", type=_positive_int)
    b.add_argument("--G", type=_positive_int, help="number of groups (group case)")
    b.add_argument("--W", type=_positive_int, default=10, help="features per group (default 10)")
    b.add_argument("--support", type=_nonneg_int, default=20)
    b.add_argument("--nonzero-groups", type=_nonneg_int, default=10)
    b.add_argument("--noise", type=float, default=0.1)
    b.add_argument("--alpha", type=_alpha, default=1.0)
    b.add_argument("--reps", type=_positive_int, default=20)
    b.add_argument("--strategies", type=_strategy_list,
                   default=[s for s in Strategy])
    _add_path_args(b)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--backend", choices=("compiled", "python"),
                   help="kernel backend (default: compiled when built)")
    b.add_argument("--out-dir", type=Path, required=True)
    b.add_argument("--quiet", action="store_true")

    g = sub.add_parser("gen", help="write a synthetic data set as CSV files")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--p", type=_positive_int, help="features (ungrouped)")
    g.add_argument("--G", type=_positive_int, help="number of groups; switches to grouped data")
    g.add_argument("--W", type=_positive_int, default=10)
    g.add_argument("--support", type=_nonneg_int, default=20, help="true support size")
    g.add_argument("--nonzero-groups", type=_nonneg_int, default=10)
    g.add_argument("--noise", type=float, default=0.1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir", type=Path, required=True)
    return parser


def _threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        v = int(raw)
    except ValueError:
        raise SparsePathError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if v < 1:
        raise SparsePathError(f"{THREADS_ENV} must be at least 1")
    return v


def _load_design(args, problem_kind):
    X, names = read_csv_matrix(args.x)
    y = load_vector(args.y)
    if problem_kind == "group":
        if args.groups is None:
            raise SparsePathError("the group lasso needs --groups")
        return group_standardize(X, y, load_groups(args.groups)), names
    return standardize(X, y), names


def _problem(args):
    kind = args.problem
    if kind is None:
        kind = "group" if args.groups is not None else ("enet" if args.alpha != 1.0 else "lasso")
    if kind == "enet":
        return Problem.enet(args.alpha)
    if args.alpha != 1.0:
        raise SparsePathError("--alpha applies only to --problem enet")
    return Problem.group() if kind == "group" else Problem.lasso()


def cmd_solve(args):
    problem = _problem(args)
    design, names = _load_design(args, problem.kind)
    lam_max = compute_lambda_max(design, problem.alpha)
    path = make_lambda_path(lam_max, args.k, args.ratio_min, args.spacing)
    config = SolveConfig(tol=args.tol, max_iter=args.max_iter)
    with threadpool_limits(limits=_threads()):
        sol, diag = solve_path(design, path, args.strategy, config, problem)

    coefs = sol.standardized_coefs(design)
    base = design.base if problem.is_group else design
    p = design.p
    names = names or [f"x{j + 1}" for j in range(p)]
    ratios = sol.lambdas / sol.lambdas[0]
    if args.scale == "original":
        header = ["k", "lambda", "lambda_ratio", "intercept"] + names
        rows = []
        for k, b in enumerate(coefs):
            icpt, c = base.to_original_scale(b)
            rows.append([k, float(sol.lambdas[k]), float(ratios[k]), float(icpt)]
                        + [float(v) for v in c])
    else:
        header = ["k", "lambda", "lambda_ratio"] + names
        rows = [[k, float(sol.lambdas[k]), float(ratios[k])] + [float(v) for v in b]
                for k, b in enumerate(coefs)]
    write_rows(args.out, header, rows)

    if args.diagnostics is not None:
        dheader = ["k", "lambda", "sweeps", "kkt_rounds", "violations", "safe_size",
                   "strong_size", "final_size", "safe_rejected", "strong_rejected",
                   "safe_active", "converged", "time"]
        drows = [
            [k, float(sol.lambdas[k]), int(sol.sweeps[k]), int(sol.kkt_rounds[k]),
             int(sol.violations[k]), int(sol.safe_size[k]), int(sol.strong_size[k]),
             int(diag.final_size[k]), int(diag.safe_rejected[k]),
             int(diag.strong_rejected[k]), int(diag.safe_active[k]),
             int(sol.converged[k]), float(sol.times[k])]
            for k in range(len(sol.lambdas))
        ]
        write_rows(args.diagnostics, dheader, drows)
    if not sol.converged.all():
        bad = np.flatnonzero(~sol.converged).tolist()
        print(f"warning: inner solver hit max_iter at path steps {bad}", file=sys.stderr)
    return 0


def cmd_bench(args):
    if args.backend is not None:
        _kernels.set_backend(args.backend)
    design = spec = None
    if args.x is not None:
        if args.y is None:
            raise SparsePathError("--x needs --y")
        problem = "group" if args.groups is not None else "lasso"
        design, _ = _load_design(args, problem)
    else:
        spec = case_spec(args.case, n=args.n, p=args.p, G=args.G, W=args.W, seed=args.seed,
                         true_support_size=args.support, nonzero_groups=args.nonzero_groups,
                         noise_scale=args.noise)
    grouped = args.groups is not None if design is not None else args.case == "group"
    strategies = args.strategies
    if grouped and Strategy.SEDPP in strategies:
        strategies = [s for s in strategies if s is not Strategy.SEDPP]
        print("note: sedpp is not available for the group lasso; skipped", file=sys.stderr)

    def progress(rep, s, elapsed):
        if not args.quiet:
            print(f"rep {rep + 1}/{args.reps} {s:>9} {elapsed:8.3f}s", file=sys.stderr)

    report = run_benchmark(
        spec, strategies, reps=args.reps, K=args.k, ratio_min=args.ratio_min,
        spacing=args.spacing, config=SolveConfig(tol=args.tol, max_iter=args.max_iter),
        alpha=args.alpha, threads=1, case=None if design is not None else args.case,
        progress=progress, design=design,
    )
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report.to_json(out / "report.json")
    write_rows(out / "timing.csv",
               ["strategy", "mean_time", "se_time", "speedup", "violations"],
               report.timing_rows())
    header, rows = report.rejection_rows()
    write_rows(out / "rejection.csv", header, rows)
    if not args.quiet:
        print(f"{'strategy':>10} {'mean(s)':>10} {'se':>10} {'speedup':>8} {'viol':>5}")
        for s, m, se, sp, v in report.timing_rows():
            print(f"{s:>10} {m:10.4f} {se:10.4f} {sp:8.2f} {v:5d}")
    return 0


def cmd_gen(args):
    if (args.p is None) == (args.G is None):
        raise SparsePathError("give exactly one of --p (ungrouped) or --G (grouped)")
    if args.G is not None:
        spec = GroupSynthSpec(n=args.n, G=args.G, W=args.W, nonzero_groups=args.nonzero_groups,
                              noise_scale=args.noise, seed=args.seed)
    else:
        spec = SynthSpec(n=args.n, p=args.p, true_support_size=args.support,
                         noise_scale=args.noise, seed=args.seed)
    X, y, beta = generate(spec)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "X.csv", X)
    write_matrix(out / "y.csv", y[:, None])
    write_matrix(out / "beta.csv", beta[:, None])
    if args.G is not None:
        write_rows(out / "groups.csv", ["group"], [[int(g)] for g in spec.groups()])
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "gen": cmd_gen}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return COMMANDS[args.command](args)
    except (SparsePathError, ValueError, OSError) as exc:
        print(f"sparsepath {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
