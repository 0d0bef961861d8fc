"""Coordinate-descent and group-descent solvers over a working set.

The three problems share the squared-error loss ``||y - X b||^2 / (2n)``:

* lasso:        ``+ lam * ||b||_1``
* elastic net:  ``+ alpha * lam * ||b||_1 + (1 - alpha) * lam / 2 * ||b||^2``
* group lasso:  ``+ lam * sum_g sqrt(W_g) * ||b_g||`` on an orthonormalized design

On a standardized design the coordinate update is a closed-form
soft-threshold, and on orthonormal groups the block update is a closed-form
group soft-threshold. The residual ``r = y - X b`` is maintained
incrementally by the kernels in :mod:`sparsepath._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .design import GroupedDesign
from .errors import InvalidAlpha, MaxIterExceeded


@dataclass(frozen=True)
class Problem:
    kind: str = "lasso"
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("lasso", "enet", "group"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidAlpha(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.kind != "enet" and self.alpha != 1.0:
            raise InvalidAlpha("alpha only applies to the elastic net")

    @classmethod
    def lasso(cls):
        return cls("lasso")

    @classmethod
    def enet(cls, alpha):
        return cls("enet", float(alpha))

    @classmethod
    def group(cls):
        return cls("group")

    @property
    def is_group(self):
        return self.kind == "group"

    def __str__(self):
        return f"enet(alpha={self.alpha:g})" if self.kind == "enet" else self.kind


LASSO = Problem.lasso()


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-7
    max_iter: int = 10000
    kkt_slack: float = 1e-8

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.kkt_slack < 0:
            raise ValueError("kkt_slack must be non-negative")


@dataclass
class ResidualState:
    """Mutable solver state: coefficients and the matching residual."""

    r: np.ndarray
    beta: np.ndarray

    @classmethod
    def zeros(cls, design):
        return cls(r=np.array(design.y, dtype=np.float64), beta=np.zeros(design.p))

    @classmethod
    def from_beta(cls, design, beta):
        beta = np.array(beta, dtype=np.float64)
        return cls(r=design.y - design.values @ beta, beta=beta)

    def residual_error(self, design):
        """Max deviation between the tracked residual and ``y - X beta``."""
        return float(np.max(np.abs(self.r - (design.y - design.values @ self.beta))))

    def copy(self):
        return ResidualState(self.r.copy(), self.beta.copy())


class SolveResult(NamedTuple):
    sweeps: int
    converged: bool
    max_change: float


def as_index(units, size):
    """Normalize a boolean mask or an iterable of indices to a sorted ``intp`` array."""
    if units is None:
        return np.arange(size, dtype=np.intp)
    a = np.asarray(units)
    if a.dtype == bool:
        if a.shape != (size,):
            raise ValueError(f"mask has shape {a.shape}, expected ({size},)")
        return np.flatnonzero(a).astype(np.intp)
    a = np.unique(a.astype(np.intp).ravel())
    if a.size and (a[0] < 0 or a[-1] >= size):
        raise IndexError("working-set index out of range")
    return a


def cd_sweep_lasso(state, design, working_set, lam):
    idx = as_index(working_set, design.p)
    return _kernels.active.cd_sweep(
        design.values, state.r, state.beta, idx, float(lam), 1.0, 1.0 / design.n
    )


def cd_sweep_enet(state, design, working_set, lam, alpha):
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1], got {alpha}")
    idx = as_index(working_set, design.p)
    return _kernels.active.cd_sweep(
        design.values, state.r, state.beta, idx,
        float(alpha * lam), 1.0 + (1.0 - alpha) * lam, 1.0 / design.n,
    )


def gd_sweep_group(state, design: GroupedDesign, working_groups, lam):
    gidx = as_index(working_groups, design.G)
    return _kernels.active.group_sweep(
        design.values, state.r, state.beta, design.starts, design.sizes,
        gidx, float(lam), 1.0 / design.n,
    )


def sweep(state, design, working_set, lam, problem=LASSO):
    if problem.kind == "group":
        return gd_sweep_group(state, design, working_set, lam)
    if problem.kind == "enet":
        return cd_sweep_enet(state, design, working_set, lam, problem.alpha)
    return cd_sweep_lasso(state, design, working_set, lam)


def solve_working_set(state, design, working_set, lam, config=SolveConfig(),
                      problem=LASSO, raise_on_max_iter=False):
    """Sweep over a fixed working set until the largest change drops below ``tol``.

    Hitting ``max_iter`` is reported through ``SolveResult.converged``; pass
    ``raise_on_max_iter=True`` to get :class:`MaxIterExceeded` instead.
    """
    units = design.G if problem.is_group else design.p
    idx = as_index(working_set, units)
    if idx.size == 0:
        return SolveResult(0, True, 0.0)
    change = np.inf
    for it in range(1, config.max_iter + 1):
        change = sweep(state, design, idx, lam, problem)
        if change < config.tol:
            return SolveResult(it, True, change)
    if raise_on_max_iter:
        raise MaxIterExceeded(
            f"no convergence after {config.max_iter} sweeps (last change {change:.3e})",
            state=state,
        )
    return SolveResult(config.max_iter, False, change)


def refresh_z(state, design, units, z, problem=LASSO):
    """Recompute the correlation cache on ``units`` from the current residual.

    Features: ``z[j] = x_j^T r / n``. Groups: ``z[g] = ||X_g^T r|| / n``.
    """
    inv_n = 1.0 / design.n
    if problem.is_group:
        gidx = as_index(units, design.G)
        _kernels.active.group_norms(
            design.values, state.r, design.starts, design.sizes, gidx, z, inv_n
        )
    else:
        idx = as_index(units, design.p)
        _kernels.active.col_dots(design.values, state.r, idx, z, inv_n)
    return z


def kkt_threshold(design, lam, problem=LASSO):
    """Bound on the zero-coefficient KKT statistic, per unit (or scalar)."""
    if problem.is_group:
        return lam * np.sqrt(design.sizes)
    return problem.alpha * lam


def kkt_check(state, design, check_set, lam, problem=LASSO, kkt_slack=1e-8, z=None):
    """Units in ``check_set`` whose zero-coefficient KKT condition fails.

    The statistic is ``|x_j^T r| / n`` (``||X_g^T r|| / n`` for groups) and
    a unit violates when it exceeds ``alpha * lam`` (``lam * sqrt(W_g)``) by
    more than the relative ``kkt_slack``. ``z``, when given, is refreshed in
    place on ``check_set`` and reused as the cache.
    """
    units = design.G if problem.is_group else design.p
    idx = as_index(check_set, units)
    if z is None:
        z = np.zeros(units)
    refresh_z(state, design, idx, z, problem)
    thr = kkt_threshold(design, lam, problem)
    if problem.is_group:
        thr = thr[idx]
    bad = np.abs(z[idx]) > thr * (1.0 + kkt_slack)
    return idx[bad]


def kkt_certify(state, design, lam, problem=LASSO, slack=1e-6):
    """Full optimality check over every unit, zero or not.

    Returns the indices (features, or groups) whose KKT condition fails at
    relative tolerance ``slack``. Nonzero units must satisfy the stationarity
    equation ``x_j^T r / n - (1 - alpha) lam b_j = alpha lam sign(b_j)``
    (group: ``X_g^T r / n = lam sqrt(W_g) b_g / ||b_g||``).
    """
    n = design.n
    grad = design.values.T @ state.r / n
    beta = state.beta
    if problem.is_group:
        bad = []
        for g in range(design.G):
            sl = design.block(g)
            bound = lam * np.sqrt(design.sizes[g])
            bg, gg = beta[sl], grad[sl]
            nb = np.linalg.norm(bg)
            if nb == 0.0:
                ok = np.linalg.norm(gg) <= bound * (1.0 + slack)
            else:
                ok = np.linalg.norm(gg - bound * bg / nb) <= bound * slack
            if not ok:
                bad.append(g)
        return np.asarray(bad, dtype=np.intp)
    a = problem.alpha
    g = grad - (1.0 - a) * lam * beta
    bound = a * lam
    zero = beta == 0.0
    viol = np.where(
        zero,
        np.abs(g) > bound * (1.0 + slack),
        np.abs(g - bound * np.sign(beta)) > bound * slack,
    )
    return np.flatnonzero(viol)


def penalty(design, beta, lam, problem=LASSO):
    if problem.is_group:
        norms = np.sqrt(np.add.reduceat(beta * beta, design.starts))
        return lam * float(np.sqrt(design.sizes) @ norms)
    a = problem.alpha
    return a * lam * float(np.abs(beta).sum()) + 0.5 * (1.0 - a) * lam * float(beta @ beta)


def objective(design, beta, lam, problem=LASSO):
    """Penalized least-squares objective evaluated directly from ``beta``."""
    resid = design.y - design.values @ beta
    return float(resid @ resid) / (2.0 * design.n) + penalty(design, beta, lam, problem)
