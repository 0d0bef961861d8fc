"""Standardized designs, grouped designs, lambda grids and shared precomputation.

Every screening rule in this package assumes the design has centered columns
with unit mean square and a centered response::

    sum_i y_i = 0,   sum_i x_ij = 0,   (1/n) sum_i x_ij^2 = 1

and, for the group lasso, additionally ``X_g^T X_g / n = I`` for every group.
The helpers here build those designs and the quantities that the basic
(non-sequential) safe rules reuse along the whole path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidGroups,
    InvalidPathSpec,
    RankDeficientGroup,
    ZeroVarianceColumn,
)

def _frozen(a):
    a.setflags(write=False)
    return a


def projection_residual_norm(y, direction):
    """``||y - P y||`` where ``P`` projects onto the span of ``direction``.

    The safe rules need quantities of the form ``n ||y||^2 - (x^T y)^2``.
    Written as ``n ||y - P y||^2`` they carry no cancellation, so exact
    fits give an exactly tiny slack instead of the square root of
    round-off.
    """
    d = np.asarray(direction, dtype=float)
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(y))
    return float(np.linalg.norm(y - d * (float(d @ y) / dd)))


@dataclass(frozen=True)
class StandardizedDesign:
    """Column-standardized design plus the metadata needed to undo it.

    ``values`` is stored Fortran-ordered so that column access is contiguous.
    """

    values: np.ndarray
    y: np.ndarray
    col_means: np.ndarray
    col_scales: np.ndarray
    y_mean: float = 0.0

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def y_sqnorm(self) -> float:
        return float(self.y @ self.y)

    def to_original_scale(self, beta):
        """Map standardized-basis coefficients to the raw feature scale.

        Returns ``(intercept, coefficients)``.
        """
        beta = np.asarray(beta, dtype=float)
        coef = beta / self.col_scales
        return self.y_mean - float(self.col_means @ coef), coef


@dataclass(frozen=True)
class GroupedDesign:
    """A standardized design whose groups have been orthonormalized.

    ``base.values`` holds the orthonormalized columns. Group ``g`` occupies
    columns ``starts[g]:starts[g] + sizes[g]``. ``back_transforms[g]`` maps a
    block of orthonormal-basis coefficients back to coefficients on the
    (column-standardized) input features.
    """

    base: StandardizedDesign
    starts: np.ndarray
    sizes: np.ndarray
    back_transforms: tuple = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def G(self) -> int:
        return len(self.sizes)

    @property
    def y(self):
        return self.base.y

    @property
    def values(self):
        return self.base.values

    def block(self, g):
        s = self.starts[g]
        return slice(s, s + self.sizes[g])

    def feature_groups(self):
        """Group index of every column."""
        return np.repeat(np.arange(self.G), self.sizes)

    def to_standardized_basis(self, beta):
        beta = np.asarray(beta, dtype=float)
        out = np.empty_like(beta)
        for g, T in enumerate(self.back_transforms):
            sl = self.block(g)
            out[sl] = T @ beta[sl]
        return out


@dataclass(frozen=True)
class LambdaPath:
    values: np.ndarray
    ratio_min: float
    spacing: str

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    @property
    def K(self) -> int:
        return len(self.values) - 1

    @property
    def lambda_max(self) -> float:
        return float(self.values[0])


@dataclass(frozen=True)
class SafePrecompute:
    """Quantities the basic safe rule needs, computed once per design.

    ``slack`` is ``sqrt(n ||y||^2 - n^2 lambda_max^2)``.
    """

    xty: np.ndarray
    star_index: int
    star_sign: float
    xtxstar: np.ndarray
    slack: float
    lambda_max: float
    n: int
    y_sqnorm: float


def _as_2d(raw_X):
    X = np.asarray(raw_X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"design must be 2-D, got shape {X.shape}")
    return X


def standardize(raw_X, raw_y) -> StandardizedDesign:
    """Center and scale columns to mean 0 and mean square 1; center ``y``."""
    X = _as_2d(raw_X)
    y = np.asarray(raw_y, dtype=np.float64).ravel()
    n, p = X.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"X has {n} rows but y has length {y.shape[0]}")
    if n < 2:
        raise DimensionMismatch("need at least two observations")

    means = X.mean(axis=0)
    Xc = X - means
    scales = np.sqrt((Xc * Xc).mean(axis=0))
    tiny = 1e-12 * np.maximum(1.0, np.abs(means))
    bad = np.flatnonzero(~(scales > tiny))
    if bad.size:
        raise ZeroVarianceColumn(int(bad[0]))

    values = np.asfortranarray(Xc / scales)
    y_mean = float(y.mean())
    return StandardizedDesign(
        values=_frozen(values),
        y=_frozen(y - y_mean),
        col_means=_frozen(means),
        col_scales=_frozen(scales),
        y_mean=y_mean,
    )


def _group_bounds(groups, p):
    labels = np.asarray(groups).ravel()
    if labels.shape[0] != p:
        raise InvalidGroups(f"{labels.shape[0]} group labels for {p} columns")
    if p == 0:
        raise InvalidGroups("empty design")
    change = np.flatnonzero(labels[1:] != labels[:-1]) + 1
    starts = np.concatenate(([0], change))
    run_labels = labels[starts]
    if len(set(run_labels.tolist())) != len(run_labels):
        raise InvalidGroups("group labels must form contiguous runs of columns")
    sizes = np.diff(np.append(starts, p))
    return starts.astype(np.intp), sizes.astype(np.intp)


def group_standardize(raw_X, raw_y, groups) -> GroupedDesign:
    """Standardize columns, then orthonormalize each group block.

    ``groups`` is one label per column; equal labels must be contiguous.
    Each block ``X_g`` is replaced by ``sqrt(n) Q_g`` from its thin QR
    factorization (diagonal of ``R_g`` made positive), so
    ``X_g^T X_g / n = I``.
    """
    design = standardize(raw_X, raw_y)
    n, p = design.values.shape
    starts, sizes = _group_bounds(groups, p)
    values = np.array(design.values, order="F")
    root_n = np.sqrt(n)
    transforms = []
    for g, (s, w) in enumerate(zip(starts, sizes)):
        if w > n:
            raise RankDeficientGroup(g)
        Q, R = np.linalg.qr(design.values[:, s:s + w])
        d = np.diag(R)
        if np.any(np.abs(d) <= 1e-8 * root_n):
            raise RankDeficientGroup(g)
        sign = np.sign(d)
        Q = Q * sign
        R = R * sign[:, None]
        values[:, s:s + w] = root_n * Q
        T = root_n * np.linalg.inv(R)
        transforms.append(_frozen(T))
    base = StandardizedDesign(
        values=_frozen(values),
        y=design.y,
        col_means=design.col_means,
        col_scales=design.col_scales,
        y_mean=design.y_mean,
    )
    return GroupedDesign(
        base=base,
        starts=_frozen(starts),
        sizes=_frozen(sizes),
        back_transforms=tuple(transforms),
    )


def compute_lambda_max(design, alpha=1.0) -> float:
    """Smallest lambda at which the all-zero coefficient vector is optimal.

    Lasso: ``max_j |x_j^T y| / n``; elastic net divides by ``alpha``; for a
    :class:`GroupedDesign` it is ``max_g ||X_g^T y|| / (n sqrt(W_g))``.
    """
    if isinstance(design, GroupedDesign):
        return float(np.max(group_scores(design)))
    xty = design.values.T @ design.y
    return float(np.max(np.abs(xty)) / (alpha * design.n))


def group_scores(design: GroupedDesign):
    """Per-group ``||X_g^T y|| / (n sqrt(W_g))``."""
    xty = design.values.T @ design.y
    sq = np.add.reduceat(xty * xty, design.starts)
    return np.sqrt(sq) / (design.n * np.sqrt(design.sizes))


def make_lambda_path(lambda_max, K=99, ratio_min=0.1, spacing="linear") -> LambdaPath:
    """Decreasing grid of ``K + 1`` values from ``lambda_max`` to ``ratio_min * lambda_max``.

    The default (K=99, linear) gives 100 values equally spaced in
    ``lambda / lambda_max`` between 1 and 0.1.
    """
    if not (isinstance(K, (int, np.integer)) and K >= 1):
        raise InvalidPathSpec(f"K must be a positive integer, got {K!r}")
    if not 0.0 < ratio_min < 1.0:
        raise InvalidPathSpec(f"ratio_min must lie in (0, 1), got {ratio_min}")
    if not lambda_max > 0.0:
        raise InvalidPathSpec(f"lambda_max must be positive, got {lambda_max}")
    if spacing == "linear":
        ratios = np.linspace(1.0, ratio_min, K + 1)
    elif spacing == "log":
        ratios = np.geomspace(1.0, ratio_min, K + 1)
    else:
        raise InvalidPathSpec(f"unknown spacing {spacing!r}")
    values = lambda_max * ratios
    values[0] = lambda_max
    if np.any(np.diff(values) >= 0):
        raise InvalidPathSpec("grid is not strictly decreasing; K too large?")
    return LambdaPath(values=_frozen(values), ratio_min=float(ratio_min), spacing=spacing)


def safe_precompute(design: StandardizedDesign) -> SafePrecompute:
    X, y, n = design.values, design.y, design.n
    xty = X.T @ y
    star = int(np.argmax(np.abs(xty)))
    lam_m = float(abs(xty[star]) / n)
    if lam_m <= 0.0:
        raise ValueError("response is orthogonal to every column; lambda_max is 0")
    y_sq = float(y @ y)
    # sqrt(n ||y||^2 - n^2 lam_m^2), computed without cancellation
    slack = float(np.sqrt(n)) * projection_residual_norm(y, X[:, star])
    return SafePrecompute(
        xty=_frozen(xty),
        star_index=star,
        star_sign=float(np.sign(xty[star])),
        xtxstar=_frozen(X.T @ X[:, star]),
        slack=slack,
        lambda_max=lam_m,
        n=n,
        y_sqnorm=y_sq,
    )
