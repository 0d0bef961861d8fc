"""Replicated timing benchmarks of screening strategies on synthetic data.

Each replication draws a fresh data set (seed ``seed + rep``), standardizes
it outside the timed region, then times :func:`~sparsepath.path.solve_path`
for every requested strategy on that same data. BLAS is limited to a single
thread while timing.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from threadpoolctl import threadpool_limits

from . import _kernels
from .design import (
    GroupedDesign,
    compute_lambda_max,
    group_standardize,
    make_lambda_path,
    standardize,
)
from .path import Strategy, rejection_profile, solve_path
from .solver import Problem, SolveConfig
from .synth import GroupSynthSpec, SynthSpec, generate

REPORT_SCHEMA = "sparsepath.run_report/1"
REPORT_KEYS = ("schema", "config", "results", "lambda_ratio", "rejection")
RESULT_KEYS = ("strategy", "mean_time", "se_time", "speedup", "violations", "times")


def case_spec(case, n=None, p=None, G=None, W=10, seed=0, true_support_size=20,
              nonzero_groups=10, noise_scale=0.1):
    """Synthetic-data spec for a named benchmark case.

    ``vary-p`` fixes n=1000 by default, ``vary-n`` fixes p=10000, ``group``
    uses n=1000 with groups of ``W`` features.
    """
    if case == "vary-p":
        return SynthSpec(n=n or 1000, p=p or 1000, true_support_size=true_support_size,
                         noise_scale=noise_scale, seed=seed)
    if case == "vary-n":
        return SynthSpec(n=n or 1000, p=p or 10000, true_support_size=true_support_size,
                         noise_scale=noise_scale, seed=seed)
    if case == "group":
        if G is None:
            G = (p // W) if p else 100
        return GroupSynthSpec(n=n or 1000, G=G, W=W, nonzero_groups=nonzero_groups,
                              noise_scale=noise_scale, seed=seed)
    raise ValueError(f"unknown benchmark case {case!r}")


@dataclass
class RunReport:
    config: dict
    strategies: list
    times: dict
    violations: dict
    lambda_ratio: np.ndarray
    rejection: dict = field(default_factory=dict)

    def mean_time(self, s):
        return float(np.mean(self.times[s]))

    def se_time(self, s):
        t = np.asarray(self.times[s])
        if t.size < 2:
            return float("nan")
        return float(np.std(t, ddof=1) / np.sqrt(t.size))

    def speedup(self, s):
        if "none" not in self.times:
            return float("nan")
        if s == "none":
            return 1.0
        return self.mean_time("none") / self.mean_time(s)

    def to_dict(self):
        def num(v):
            return None if v is None or not np.isfinite(v) else float(v)

        return {
            "schema": REPORT_SCHEMA,
            "config": dict(self.config),
            "results": [
                {
                    "strategy": s,
                    "mean_time": num(self.mean_time(s)),
                    "se_time": num(self.se_time(s)),
                    "speedup": num(self.speedup(s)),
                    "violations": int(self.violations[s]),
                    "times": [float(t) for t in self.times[s]],
                }
                for s in self.strategies
            ],
            "lambda_ratio": [float(r) for r in self.lambda_ratio],
            "rejection": {
                s: {k: [float(v) for v in arr] for k, arr in prof.items()}
                for s, prof in self.rejection.items()
            },
        }

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    def timing_rows(self):
        return [
            (s, self.mean_time(s), self.se_time(s), self.speedup(s), int(self.violations[s]))
            for s in self.strategies
        ]

    def rejection_rows(self):
        """One row per lambda: ratio then ``safe, strong, total`` per strategy."""
        header = ["k", "lambda_ratio"]
        cols = []
        for s in self.strategies:
            for mech in ("safe", "strong", "total"):
                header.append(f"{s}_{mech}")
                cols.append(self.rejection[s][mech])
        rows = [
            [k, float(r)] + [float(c[k]) for c in cols]
            for k, r in enumerate(self.lambda_ratio)
        ]
        return header, rows


def _synthetic_designs(spec):
    grouped = isinstance(spec, GroupSynthSpec)

    def make(rep):
        rep_spec = replace(spec, seed=spec.seed + rep)
        X, y, _ = generate(rep_spec)
        if grouped:
            return group_standardize(X, y, rep_spec.groups())
        return standardize(X, y)

    return make


def run_benchmark(spec, strategies, reps=20, K=99, ratio_min=0.1, spacing="linear",
                  config=SolveConfig(), alpha=1.0, threads=1, case=None, progress=None,
                  design=None):
    """Time every strategy on ``reps`` replications.

    Each replication draws fresh synthetic data from ``spec`` with seed
    ``spec.seed + rep``. Passing a prepared ``design`` instead times the
    same data ``reps`` times (``spec`` may then be ``None``). Rejection
    profiles come from the first replication.

    Returns
    -------
    RunReport
    """
    strategies = [Strategy.parse(s).value for s in strategies]
    if not strategies:
        raise ValueError("no strategies requested")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    if design is not None:
        make = lambda rep: design  # noqa: E731
        grouped = isinstance(design, GroupedDesign)
    else:
        make = _synthetic_designs(spec)
        grouped = isinstance(spec, GroupSynthSpec)
    if grouped:
        problem = Problem.group()
    else:
        problem = Problem.enet(alpha) if alpha != 1.0 else Problem.lasso()
    times = {s: [] for s in strategies}
    violations = {s: 0 for s in strategies}
    rejection = {}
    ratios = None
    n = p = None
    with threadpool_limits(limits=threads):
        for rep in range(reps):
            d = make(rep)
            n, p = d.n, d.p
            lam_max = compute_lambda_max(d, 1.0 if grouped else alpha)
            path = make_lambda_path(lam_max, K, ratio_min, spacing)
            ratios = path.values / path.values[0]
            for s in strategies:
                t0 = time.perf_counter()
                sol, diag = solve_path(d, path, s, config, problem)
                elapsed = time.perf_counter() - t0
                times[s].append(elapsed)
                violations[s] += int(sol.violations.sum())
                if rep == 0:
                    rejection[s] = rejection_profile(diag)
                if progress is not None:
                    progress(rep, s, elapsed)
    cfg = {
        "case": case,
        "n": int(n),
        "p": int(p),
        "case_spec": None if spec is None else asdict(spec),
        "problem": str(problem),
        "reps": int(reps),
        "K": int(K),
        "ratio_min": float(ratio_min),
        "spacing": spacing,
        "tol": float(config.tol),
        "max_iter": int(config.max_iter),
        "kkt_slack": float(config.kkt_slack),
        "seed": None if spec is None else int(spec.seed),
        "threads": int(threads),
        "backend": _kernels.backend_name(),
    }
    return RunReport(config=cfg, strategies=strategies, times=times, violations=violations,
                     lambda_ratio=ratios, rejection=rejection)
