"""Synthetic data, an independent proximal-gradient oracle, and safety checks.

The oracle deliberately shares no code with the coordinate-descent path
solver: it runs accelerated proximal gradient (FISTA with adaptive restart)
on the full problem, with the step size taken from a power-iteration
estimate of the largest eigenvalue of ``X^T X / n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import GroupedDesign
from .errors import MaxIterExceeded
from .solver import LASSO, Problem, objective, penalty


@dataclass(frozen=True)
class SynthSpec:
    """Gaussian linear model ``y = X b + noise_scale * eps``.

    ``X`` and ``eps`` are i.i.d. standard normal, the support of ``b`` is
    drawn uniformly without replacement, and its entries are Unif[-1, 1].
    """

    n: int
    p: int
    true_support_size: int = 20
    noise_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        if not 0 <= self.true_support_size <= self.p:
            raise ValueError("true_support_size must lie in [0, p]")


@dataclass(frozen=True)
class GroupSynthSpec:
    """Grouped variant: ``G`` groups of ``W`` features, ``nonzero_groups`` of them active."""

    n: int
    G: int
    W: int = 10
    nonzero_groups: int = 10
    noise_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.G < 1 or self.W < 1:
            raise ValueError("need n >= 2, G >= 1, W >= 1")
        if not 0 <= self.nonzero_groups <= self.G:
            raise ValueError("nonzero_groups must lie in [0, G]")

    @property
    def p(self):
        return self.G * self.W

    def groups(self):
        return np.repeat(np.arange(self.G), self.W)


def generate(spec, beta=None):
    """Draw ``(X, y, beta)`` for ``spec``; a given ``beta`` overrides the random one.

    Uses ``numpy.random.default_rng(spec.seed)`` (PCG64), so a seed fully
    determines the output.
    """
    rng = np.random.default_rng(spec.seed)
    X = rng.standard_normal((spec.n, spec.p))
    if beta is None:
        beta = np.zeros(spec.p)
        if isinstance(spec, GroupSynthSpec):
            active = rng.choice(spec.G, size=spec.nonzero_groups, replace=False)
            cols = (active[:, None] * spec.W + np.arange(spec.W)).ravel()
        else:
            cols = rng.choice(spec.p, size=spec.true_support_size, replace=False)
        beta[cols] = rng.uniform(-1.0, 1.0, size=cols.size)
    else:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (spec.p,):
            raise ValueError(f"beta must have shape ({spec.p},)")
    eps = rng.standard_normal(spec.n)
    y = X @ beta + spec.noise_scale * eps
    return X, y, beta


def largest_eigenvalue(X, n_iter=1000, tol=1e-12, seed=0):
    """Power iteration for the top eigenvalue of ``X^T X / n``."""
    n = X.shape[0]
    v = np.random.default_rng(seed).standard_normal(X.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(n_iter):
        w = X.T @ (X @ v) / n
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - est) <= tol * new:
            return new
        est = new
    return est


def _prox(design, v, step, lam, problem):
    if problem.is_group:
        thr = step * lam * np.sqrt(design.sizes)
        norms = np.sqrt(np.add.reduceat(v * v, design.starts))
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(norms > thr, 1.0 - thr / norms, 0.0)
        return v * np.repeat(scale, design.sizes)
    a = problem.alpha
    soft = np.sign(v) * np.maximum(np.abs(v) - step * a * lam, 0.0)
    return soft / (1.0 + step * (1.0 - a) * lam)


@dataclass
class OracleEntry:
    beta: np.ndarray
    objective: float
    iterations: int


@dataclass
class OracleSolution:
    lambdas: np.ndarray
    coefs: np.ndarray
    objectives: np.ndarray
    iterations: np.ndarray


def ista_solve(design, lam, problem=LASSO, tol=1e-10, max_iter=200000,
               beta0=None, lipschitz=None, accelerate=True):
    """Proximal gradient on the full problem at a single ``lam``.

    Stops when the relative objective change falls below ``tol`` and the
    proximal-gradient step (scaled by the Lipschitz constant) is below
    ``tol`` as well. ``accelerate`` switches on FISTA momentum with
    function-value restart.
    """
    X, y, n = design.values, design.y, design.n
    L = lipschitz if lipschitz is not None else largest_eigenvalue(X)
    L *= 1.0 + 1e-6
    step = 1.0 / L
    x = np.zeros(design.p) if beta0 is None else np.array(beta0, dtype=float)
    Xx = X @ x

    def obj(Xb, b):
        res = y - Xb
        return float(res @ res) / (2.0 * n) + penalty(design, b, lam, problem)

    f = obj(Xx, x)
    yv, Xy, t = x, Xx, 1.0
    for it in range(1, max_iter + 1):
        grad = X.T @ (Xy - y) / n
        x_new = _prox(design, yv - step * grad, step, lam, problem)
        Xx_new = X @ x_new
        f_new = obj(Xx_new, x_new)
        gmap = L * float(np.max(np.abs(x_new - yv))) if x_new.size else 0.0
        if accelerate and t > 1.0 and f_new > f:
            # restart: drop momentum and take a plain step from x
            yv, Xy, t = x, Xx, 1.0
            continue
        done = abs(f - f_new) <= tol * max(1.0, abs(f_new)) and gmap <= tol
        if accelerate:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            mom = (t - 1.0) / t_new
            yv = x_new + mom * (x_new - x)
            Xy = Xx_new + mom * (Xx_new - Xx)
            t = t_new
        else:
            yv, Xy = x_new, Xx_new
        x, Xx, f = x_new, Xx_new, f_new
        if done:
            return OracleEntry(beta=x, objective=objective(design, x, lam, problem), iterations=it)
    raise MaxIterExceeded(f"proximal gradient did not converge in {max_iter} iterations",
                          state=OracleEntry(x, f, max_iter))


def ista_path(design, lambdas, problem=None, tol=1e-10, max_iter=200000, accelerate=True):
    """Oracle solutions along a path, warm-started from the previous lambda."""
    if problem is None:
        problem = Problem.group() if isinstance(design, GroupedDesign) else LASSO
    lambdas = np.asarray(getattr(lambdas, "values", lambdas), dtype=float)
    L = largest_eigenvalue(design.values)
    coefs = np.zeros((lambdas.size, design.p))
    objs = np.zeros(lambdas.size)
    iters = np.zeros(lambdas.size, dtype=int)
    beta = None
    for k, lam in enumerate(lambdas):
        e = ista_solve(design, lam, problem, tol=tol, max_iter=max_iter,
                       beta0=beta, lipschitz=L, accelerate=accelerate)
        beta = e.beta
        coefs[k], objs[k], iters[k] = e.beta, e.objective, e.iterations
    return OracleSolution(lambdas=lambdas, coefs=coefs, objectives=objs, iterations=iters)


@dataclass
class SafetyReport:
    violations: np.ndarray
    magnitudes: np.ndarray

    @property
    def passed(self):
        return self.violations.size == 0


def check_safety(rejected, oracle_beta, active_tol=1e-8, design=None):
    """Rejected units whose oracle coefficient is active (``|b| > active_tol``).

    ``rejected`` is a boolean mask or index array over features, or over
    groups when ``design`` is a :class:`GroupedDesign` (a group counts as
    active when any of its coefficients is).
    """
    beta = np.abs(np.asarray(oracle_beta, dtype=float))
    if isinstance(design, GroupedDesign):
        mag = np.maximum.reduceat(beta, design.starts)
    else:
        mag = beta
    rej = np.asarray(rejected)
    idx = np.flatnonzero(rej) if rej.dtype == bool else rej.astype(np.intp).ravel()
    bad = idx[mag[idx] > active_tol]
    return SafetyReport(violations=bad, magnitudes=mag[bad])
