"""Pathwise coordinate descent with pluggable feature screening.

:func:`solve_path` walks a decreasing lambda grid, warm-starting each solve
from the previous solution. The hybrid strategy (``SSR_BEDPP``) proceeds at
each ``lam_k`` as follows:

1. while the safe rule is still discarding features, compute the safe set
   ``S`` and refresh the correlation cache ``z`` only for features that
   just entered ``S``; once ``S`` is everything, stop using the safe rule;
2. strong set ``H = {j in S : |z_j| >= 2 lam_k - lam_{k-1}}``;
3. coordinate descent on ``H``;
4. KKT check on ``S \\ H`` (refreshing ``z`` there); add violators to ``H``
   and go back to 3 until there are none.

Other strategies are degenerate cases: ``SSR`` never screens safely,
``BEDPP``/``SEDPP`` solve on the safe set with no strong step or KKT check,
``AC`` cycles on the current support and checks every feature, ``NONE``
sweeps everything.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from . import screening as scr
from .design import GroupedDesign, LambdaPath, safe_precompute
from .errors import PathAborted
from .solver import (
    LASSO,
    Problem,
    ResidualState,
    SolveConfig,
    kkt_threshold,
    refresh_z,
    solve_working_set,
)

MAX_KKT_ROUNDS = 100


class Strategy(str, enum.Enum):
    NONE = "none"
    AC = "ac"
    SSR = "ssr"
    SEDPP = "sedpp"
    BEDPP = "bedpp"
    SSR_BEDPP = "ssr-bedpp"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for s in cls:
            if s.value == key:
                return s
        raise ValueError(f"unknown strategy {value!r}; choose from {[s.value for s in cls]}")

    def __str__(self):
        return self.value


GROUP_STRATEGIES = (Strategy.NONE, Strategy.AC, Strategy.SSR, Strategy.BEDPP, Strategy.SSR_BEDPP)


@dataclass
class PathDiagnostics:
    """Per-lambda screening counts.

    ``safe_rejected + strong_rejected + strong_size == units`` at every step.
    ``strong_size`` is the working set before any KKT additions.
    """

    units: int
    safe_rejected: np.ndarray
    strong_rejected: np.ndarray
    strong_size: np.ndarray
    final_size: np.ndarray
    violations: np.ndarray
    safe_active: np.ndarray


@dataclass
class PathSolution:
    lambdas: np.ndarray
    coefs: np.ndarray
    sweeps: np.ndarray
    kkt_rounds: np.ndarray
    violations: np.ndarray
    safe_size: np.ndarray
    strong_size: np.ndarray
    times: np.ndarray
    converged: np.ndarray
    strategy: Strategy
    problem: Problem
    config: SolveConfig
    meta: dict = field(default_factory=dict)

    @property
    def total_time(self):
        return float(self.times.sum())

    def coef_at(self, k):
        return self.coefs[k]

    def standardized_coefs(self, design):
        """Coefficients on the column-standardized features (undoes group orthonormalization)."""
        if isinstance(design, GroupedDesign):
            return np.vstack([design.to_standardized_basis(b) for b in self.coefs])
        return self.coefs.copy()


class _FeatureOps:
    """Unit = feature; lasso or elastic net."""

    def __init__(self, design, problem):
        self.design = design
        self.problem = problem
        self.alpha = problem.alpha
        self.units = design.p
        self.pre = safe_precompute(design)
        self.lambda_max = self.pre.lambda_max / problem.alpha

    def initial_z(self):
        return self.pre.xty / self.design.n

    def ssr_rejected(self, z, candidates, lam_prev, lam):
        return scr.ssr_filter(z, candidates, lam_prev, lam, alpha=self.alpha)

    def safe_set(self, lam, strategy, state, res, lam_prev):
        if self.problem.kind == "enet":
            return scr.bedpp_enet_filter(self.pre, lam, self.alpha)
        if strategy is Strategy.SEDPP:
            refresh_z(res, self.design, None, state.z)
            state.fresh[:] = True
            seq = scr.seq_precompute(self.design, res.r, lam_prev, lam)
            return scr.sedpp_filter(self.pre, seq, state.z, lam_prev, lam)
        return scr.bedpp_filter(self.pre, lam)

    def nonzero_units(self, beta):
        return beta != 0.0

    def drop(self, res, units):
        """Zero the coefficients of ``units`` (index array) and fix the residual."""
        idx = units[res.beta[units] != 0.0]
        if idx.size:
            res.r += self.design.values[:, idx] @ res.beta[idx]
            res.beta[idx] = 0.0


class _GroupOps:
    """Unit = group of an orthonormalized design."""

    def __init__(self, design, problem):
        self.design = design
        self.problem = problem
        self.units = design.G
        self.pre = scr.group_safe_precompute(design)
        self.lambda_max = self.pre.lambda_max

    def initial_z(self):
        return np.sqrt(self.pre.xgty_sq) / self.design.n

    def ssr_rejected(self, z, candidates, lam_prev, lam):
        return scr.ssr_group_filter(z, candidates, self.design.sizes, lam_prev, lam)

    def safe_set(self, lam, strategy, state, res, lam_prev):
        return scr.bedpp_group_filter(self.pre, lam)

    def nonzero_units(self, beta):
        return np.add.reduceat(np.abs(beta), self.design.starts) != 0.0

    def drop(self, res, units):
        for g in units:
            sl = self.design.block(g)
            b = res.beta[sl]
            if np.any(b != 0.0):
                res.r += self.design.values[:, sl] @ b
                res.beta[sl] = 0.0


def _check_path(path):
    lam = np.asarray(path.values if isinstance(path, LambdaPath) else path, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("lambda path must be a non-empty 1-D sequence")
    if np.any(np.diff(lam) >= 0):
        raise ValueError("lambda path must be strictly decreasing")
    if lam[-1] <= 0:
        raise ValueError("lambda values must be positive")
    return lam


def solve_path(design, path, strategy=Strategy.SSR_BEDPP, config=SolveConfig(),
               problem=None, monitor=None, meta=None):
    """Solve a lasso, elastic-net or group-lasso path with a screening strategy.

    Parameters
    ----------
    design : StandardizedDesign or GroupedDesign
        A :class:`GroupedDesign` implies the group lasso.
    path : LambdaPath or sequence of float
        Strictly decreasing; ``path[0]`` must be the problem's lambda_max.
    strategy : Strategy or str
    config : SolveConfig
    problem : Problem, optional
        Defaults to the lasso (group lasso for a grouped design).
    monitor : callable, optional
        Called as ``monitor(k, state, residual_state)`` right before the
        strong rule is applied at step ``k``; used by tests to audit the
        correlation cache.

    Returns
    -------
    (PathSolution, PathDiagnostics)
    """
    strategy = Strategy.parse(strategy)
    if problem is None:
        problem = Problem.group() if isinstance(design, GroupedDesign) else LASSO
    if problem.is_group != isinstance(design, GroupedDesign):
        raise ValueError("group problems need a GroupedDesign and vice versa")
    if problem.is_group and strategy not in GROUP_STRATEGIES:
        raise ValueError(f"strategy {strategy} is not available for the group lasso")
    lam = _check_path(path)

    ops = _GroupOps(design, problem) if problem.is_group else _FeatureOps(design, problem)
    if abs(lam[0] - ops.lambda_max) > 1e-10 * ops.lambda_max:
        raise ValueError(
            f"path must start at lambda_max={ops.lambda_max!r}, got {lam[0]!r}"
        )
    units = ops.units
    K1 = lam.size
    all_units = np.ones(units, dtype=bool)

    coefs = np.zeros((K1, design.p))
    sweeps = np.zeros(K1, dtype=int)
    rounds = np.zeros(K1, dtype=int)
    safe_size = np.full(K1, units, dtype=int)
    strong_size = np.zeros(K1, dtype=int)
    final_size = np.zeros(K1, dtype=int)
    violations = np.zeros(K1, dtype=int)
    safe_on = np.zeros(K1, dtype=bool)
    times = np.zeros(K1)
    converged = np.ones(K1, dtype=bool)

    uses_safe = strategy in (Strategy.SSR_BEDPP, Strategy.BEDPP, Strategy.SEDPP)
    uses_strong = strategy in (Strategy.SSR, Strategy.SSR_BEDPP)
    res = ResidualState.zeros(design)
    state = scr.ScreeningState.initial(units, z0=ops.initial_z(), safe_active=uses_safe)
    thr = kkt_threshold(design, 1.0, problem)

    def build(k):
        return PathSolution(
            lambdas=lam[:k], coefs=coefs[:k], sweeps=sweeps[:k], kkt_rounds=rounds[:k],
            violations=violations[:k], safe_size=safe_size[:k],
            strong_size=strong_size[:k], times=times[:k],
            converged=converged[:k], strategy=strategy, problem=problem, config=config,
            meta=dict(meta or {}),
        ), PathDiagnostics(
            units=units,
            safe_rejected=units - safe_size[:k],
            strong_rejected=safe_size[:k] - strong_size[:k],
            strong_size=strong_size[:k],
            final_size=final_size[:k],
            violations=violations[:k],
            safe_active=safe_on[:k],
        )

    # lam[0] is lambda_max: the zero vector is the solution.
    strong_size[0] = units

    for k in range(1, K1):
        t0 = time.perf_counter()
        lam_k, lam_prev = lam[k], lam[k - 1]

        # safe screening
        if strategy in (Strategy.NONE, Strategy.AC, Strategy.SSR):
            S = all_units
        elif state.safe_active:
            S = ops.safe_set(lam_k, strategy, state, res, lam_prev)
            if uses_strong:
                stale = S & ~state.fresh
                if stale.any():
                    refresh_z(res, design, stale, state.z, problem)
                state.fresh = S.copy()
                if S.all():
                    state.safe_active = False
            state.prev_safe_set = S
        else:
            S = state.prev_safe_set
        safe_on[k] = state.safe_active
        state.safe_set = S

        # strong screening
        if strategy is Strategy.NONE:
            H = all_units.copy()
        elif strategy is Strategy.AC:
            H = ops.nonzero_units(res.beta)
        elif uses_strong:
            if monitor is not None:
                monitor(k, state, res)
            H = scr.hssr_combine(S, ops.ssr_rejected(state.z, S, lam_prev, lam_k))
        else:
            H = S.copy()
        state.strong_set = H
        safe_size[k] = int(S.sum())
        strong_size[k] = int(H.sum())

        outside = np.flatnonzero(~H)
        if outside.size:
            ops.drop(res, outside)

        check_all = strategy is Strategy.AC
        n_sweeps = n_rounds = n_viol = 0
        ok = True
        while True:
            out = solve_working_set(res, design, H, lam_k, config, problem)
            n_sweeps += out.sweeps
            ok = ok and out.converged
            if not (uses_strong or check_all):
                break
            check = ~H if check_all else S & ~H
            idx = np.flatnonzero(check)
            if idx.size == 0:
                break
            refresh_z(res, design, idx, state.z, problem)
            bound = thr * lam_k
            if problem.is_group:
                bound = bound[idx]
            V = idx[np.abs(state.z[idx]) > bound * (1.0 + config.kkt_slack)]
            if V.size == 0:
                break
            n_viol += V.size
            n_rounds += 1
            if n_rounds > MAX_KKT_ROUNDS:
                coefs[k] = res.beta
                raise PathAborted(
                    f"KKT violations persisted after {MAX_KKT_ROUNDS} re-solves at k={k}",
                    partial=build(k),
                )
            H[V] = True

        if uses_strong:
            # keep z current on all of S for the next strong step
            refresh_z(res, design, H, state.z, problem)
            state.fresh = S.copy()

        coefs[k] = res.beta
        sweeps[k] = n_sweeps
        rounds[k] = n_rounds
        violations[k] = n_viol
        final_size[k] = int(H.sum())
        converged[k] = ok
        times[k] = time.perf_counter() - t0

    return build(K1)


def rejection_profile(diagnostics: PathDiagnostics):
    """Per-lambda fractions of units discarded, by mechanism.

    Returns a dict of arrays ``safe``, ``strong`` and ``total``.
    """
    u = float(diagnostics.units)
    safe = diagnostics.safe_rejected / u
    strong = diagnostics.strong_rejected / u
    return {"safe": safe, "strong": strong, "total": safe + strong}


def count_violations(solution_or_diag):
    """Total number of KKT violations found (and repaired) along the path."""
    return int(np.sum(solution_or_diag.violations))
