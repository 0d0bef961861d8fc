"""Feature screening rules for lasso-type regularization paths.

Safe rules (never discard a feature that is active in the exact solution):

* :func:`bedpp_filter` - basic EDPP for the lasso, non-sequential, O(p) per
  lambda after a single O(np) precomputation.
* :func:`bedpp_enet_filter` - the same rule for the elastic net.
* :func:`bedpp_group_filter` - the same rule for the group lasso.
* :func:`sedpp_filter` - sequential EDPP; needs the previous solution and
  a full pass over the design at every lambda.

Heuristic rules (may err, so the caller must verify KKT conditions):

* :func:`ssr_filter`, :func:`ssr_group_filter` - sequential strong rules.

:func:`hssr_combine` builds the hybrid safe-strong working set.

Safe filters return a boolean *survivor* mask; strong filters return a
boolean *rejected* mask. All inequalities are strict, so boundary ties
survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import GroupedDesign, SafePrecompute, projection_residual_norm
from .errors import InvalidAlpha, LambdaOutOfRange, NonDecreasingLambda

# Below this squared norm the previous fit is treated as the null fit.
NULL_FIT_SQNORM = 1e-12

# Relative margin on sequential-rule rejections. When y lies in the span of
# the previous fit the rule's ball has radius zero and active features sit
# exactly on the boundary, where round-off alone could reject them.
SEQ_MARGIN = 1e-9


@dataclass
class ScreeningState:
    """Mutable screening bookkeeping carried along a path.

    ``z`` caches ``x_j^T r / n`` (group norms for the group lasso).
    ``fresh`` marks the entries of ``z`` that match the current residual.
    ``safe_active`` turns off permanently once the safe rule stops
    discarding anything.
    """

    safe_set: np.ndarray
    strong_set: np.ndarray
    z: np.ndarray
    fresh: np.ndarray
    safe_active: bool = True
    prev_safe_set: np.ndarray | None = None

    @classmethod
    def initial(cls, units, z0=None, safe_active=True):
        z = np.zeros(units) if z0 is None else np.array(z0, dtype=float)
        return cls(
            safe_set=np.zeros(units, dtype=bool),
            strong_set=np.zeros(units, dtype=bool),
            z=z,
            fresh=np.full(units, z0 is not None),
            safe_active=safe_active,
            prev_safe_set=np.zeros(units, dtype=bool),
        )


@dataclass(frozen=True)
class SeqPrecompute:
    """Per-step quantities for the sequential rule, all O(n) from the residual."""

    fitted: np.ndarray
    fitted_sqnorm: float
    a: float
    c: float
    root: float = 0.0


@dataclass(frozen=True)
class GroupSafePrecompute:
    lambda_max: float
    star_group: int
    W_star: int
    vbar: np.ndarray
    xgty_sq: np.ndarray
    xgtv_sq: np.ndarray
    ydotv: np.ndarray
    sizes: np.ndarray
    slack: float
    n: int
    y_sqnorm: float


def seq_precompute(design, r, lam_k, lam_next):
    if not lam_next < lam_k:
        raise NonDecreasingLambda(f"need lam_next < lam_k, got {lam_next} >= {lam_k}")
    fitted = design.y - r
    return SeqPrecompute(
        fitted=fitted,
        fitted_sqnorm=float(fitted @ fitted),
        a=float(design.y @ fitted),
        c=(lam_k - lam_next) / (lam_k * lam_next),
        # sqrt(n ||y||^2 - n a^2 / ||f||^2) = sqrt(n) ||y - P_f y||
        root=float(np.sqrt(design.n)) * projection_residual_norm(design.y, fitted),
    )


def group_safe_precompute(design: GroupedDesign) -> GroupSafePrecompute:
    X, y, n = design.values, design.y, design.n
    xty = X.T @ y
    xgty_sq = np.add.reduceat(xty * xty, design.starts)
    scores = np.sqrt(xgty_sq) / (n * np.sqrt(design.sizes))
    star = int(np.argmax(scores))
    lam_m = float(scores[star])
    if lam_m <= 0.0:
        raise ValueError("response is orthogonal to every group; lambda_max is 0")
    sl = design.block(star)
    vbar = X[:, sl] @ xty[sl]
    xtv = X.T @ vbar
    w_star = int(design.sizes[star])
    y_sq = float(y @ y)
    # sqrt(n ||y||^2 - n^2 lam_m^2 W_*) = sqrt(n) ||y - X_* X_*^T y / n||
    slack = float(np.sqrt(n) * np.linalg.norm(y - vbar / n))
    return GroupSafePrecompute(
        lambda_max=lam_m,
        star_group=star,
        W_star=w_star,
        vbar=vbar,
        xgty_sq=xgty_sq,
        xgtv_sq=np.add.reduceat(xtv * xtv, design.starts),
        ydotv=np.add.reduceat(xty * xtv, design.starts),
        sizes=np.asarray(design.sizes),
        slack=slack,
        n=n,
        y_sqnorm=y_sq,
    )


def _check_lambda(lam, lam_m):
    if not lam > 0.0:
        raise LambdaOutOfRange(f"lambda must be positive, got {lam}")
    if lam > lam_m * (1.0 + 1e-12):
        raise LambdaOutOfRange(f"lambda {lam} exceeds lambda_max {lam_m}")
    return min(lam, lam_m)


def _candidates(candidates, size):
    if candidates is None:
        return np.ones(size, dtype=bool)
    c = np.asarray(candidates)
    if c.dtype == bool:
        return c
    mask = np.zeros(size, dtype=bool)
    mask[c] = True
    return mask


def ssr_filter(z, candidates, lam_k, lam_next, alpha=1.0):
    """Sequential strong rule: reject ``j`` when ``|z_j| < alpha (2 lam_next - lam_k)``.

    ``alpha`` scales the threshold for the elastic net. A non-positive
    threshold rejects nothing.
    """
    z = np.asarray(z)
    thr = alpha * (2.0 * lam_next - lam_k)
    return _candidates(candidates, z.shape[0]) & (np.abs(z) < thr)


def ssr_group_filter(group_z, candidates, sizes, lam_k, lam_next):
    """Group strong rule: reject ``g`` when ``z_g < sqrt(W_g) (2 lam_next - lam_k)``."""
    group_z = np.asarray(group_z)
    thr = np.sqrt(sizes) * (2.0 * lam_next - lam_k)
    return _candidates(candidates, group_z.shape[0]) & (group_z < thr)


def bedpp_filter(pre: SafePrecompute, lam):
    """Survivor mask of the basic EDPP rule at ``lam`` in ``(0, lambda_max]``.

    Feature ``j`` is discarded when::

        |(lm + lam) x_j^T y - (lm - lam) s lm x_j^T x_*|
            < 2 n lam lm - (lm - lam) sqrt(n ||y||^2 - n^2 lm^2)

    where ``lm = lambda_max`` and ``s = sign(x_*^T y)``. ``x_*`` itself sits
    exactly on the boundary and is always kept.
    """
    lm = pre.lambda_max
    lam = _check_lambda(lam, lm)
    n = pre.n
    rhs = 2.0 * n * lam * lm - (lm - lam) * pre.slack
    survive = np.ones(pre.xty.shape[0], dtype=bool)
    if rhs <= 0.0:
        return survive
    lhs = np.abs((lm + lam) * pre.xty - (lm - lam) * pre.star_sign * lm * pre.xtxstar)
    survive = ~(lhs < rhs)
    survive[pre.star_index] = True
    return survive


def bedpp_enet_filter(pre: SafePrecompute, lam, alpha):
    """Survivor mask of the basic EDPP rule for the elastic net.

    Here ``lambda_max = max_j |x_j^T y| / (alpha n)``; with ``alpha = 1`` the
    rule coincides with :func:`bedpp_filter`.
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1], got {alpha}")
    lm = pre.lambda_max / alpha
    lam = _check_lambda(lam, lm)
    n = pre.n
    ridge = 1.0 + lam * (1.0 - alpha)
    # sqrt(n ||y||^2 ridge - n^2 alpha^2 lm^2), split so the cancelling part
    # reuses the lasso slack
    if alpha == 1.0:
        root = pre.slack
    else:
        root = float(np.sqrt(pre.slack ** 2 + n * lam * (1.0 - alpha) * pre.y_sqnorm))
    rhs = 2.0 * n * alpha * lam * lm - (lm - lam) * root
    survive = np.ones(pre.xty.shape[0], dtype=bool)
    if rhs <= 0.0:
        return survive
    coef = pre.star_sign * alpha * lm / ridge
    lhs = np.abs((lm + lam) * pre.xty - (lm - lam) * coef * pre.xtxstar)
    survive = ~(lhs < rhs)
    survive[pre.star_index] = True
    return survive


def bedpp_group_filter(pre: GroupSafePrecompute, lam):
    """Survivor mask (over groups) of the basic EDPP rule for the group lasso."""
    lm = pre.lambda_max
    lam = _check_lambda(lam, lm)
    n = pre.n
    rhs = 2.0 * n * lam * lm * np.sqrt(pre.sizes) - (lm - lam) * pre.slack
    sq = (
        (lam + lm) ** 2 * pre.xgty_sq
        - 2.0 * (lm * lm - lam * lam) * pre.ydotv / n
        + (lm - lam) ** 2 * pre.xgtv_sq / (n * n)
    )
    lhs = np.sqrt(np.maximum(sq, 0.0))
    survive = ~(lhs < rhs)
    survive[pre.star_group] = True
    return survive


def sedpp_filter(pre: SafePrecompute, seq: SeqPrecompute, z, lam_k, lam_next):
    """Survivor mask of the sequential EDPP rule at ``lam_next``.

    ``z`` must hold ``x_j^T r(lam_k) / n`` for every feature. Feature ``j``
    is discarded when::

        |n z_j / lam_k + (c/2) (x_j^T y - a x_j^T f / ||f||^2)|
            < n - (c/2) sqrt(n ||y||^2 - n a^2 / ||f||^2)

    with ``f = y - r`` the fitted values, ``a = y^T f`` and
    ``c = (lam_k - lam_next) / (lam_k lam_next)``. A null fit falls back to
    :func:`bedpp_filter` at ``lam_next``. Rejection additionally requires
    clearing the boundary by ``SEQ_MARGIN * n``.
    """
    if not lam_next < lam_k:
        raise NonDecreasingLambda(f"need lam_next < lam_k, got {lam_next} >= {lam_k}")
    if seq.fitted_sqnorm < NULL_FIT_SQNORM:
        return bedpp_filter(pre, lam_next)
    n = pre.n
    z = np.asarray(z)
    xtf = pre.xty - n * z
    half_c = 0.5 * seq.c
    lhs = np.abs(n * z / lam_k + half_c * (pre.xty - seq.a * xtf / seq.fitted_sqnorm))
    rhs = n - half_c * seq.root
    if rhs <= 0.0:
        return np.ones(z.shape[0], dtype=bool)
    return ~(lhs < rhs - SEQ_MARGIN * n)


def hssr_combine(safe_set, ssr_rejected):
    """Working set of the hybrid rule: safe survivors not rejected by the strong rule."""
    return np.asarray(safe_set, dtype=bool) & ~np.asarray(ssr_rejected, dtype=bool)


def hssr_rejected(safe_set, ssr_rejected):
    """Everything the hybrid rule discards: the safe complement plus strong rejections."""
    return ~hssr_combine(safe_set, ssr_rejected)
