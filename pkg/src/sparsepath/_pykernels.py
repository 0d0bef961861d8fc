"""Pure-Python/numpy reference kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is not built or when ``SPARSEPATH_BACKEND=python``.
All arrays are modified in place. ``X`` is Fortran-ordered float64, index
arrays are ``np.intp``.
"""

import math

import numpy as np


def cd_sweep(X, r, beta, idx, l1, denom, inv_n):
    """One coordinate-descent pass over ``idx``; returns max |coefficient change|.

    Update: ``b_j <- soft(x_j^T r / n + b_j, l1) / denom``.
    """
    max_change = 0.0
    for j in idx:
        xj = X[:, j]
        old = beta[j]
        z = float(xj @ r) * inv_n + old
        if z > l1:
            new = (z - l1) / denom
        elif z < -l1:
            new = (z + l1) / denom
        else:
            new = 0.0
        if new != old:
            delta = new - old
            r -= delta * xj
            beta[j] = new
            if abs(delta) > max_change:
                max_change = abs(delta)
    return max_change


def group_sweep(X, r, beta, starts, sizes, gidx, lam, inv_n):
    """One blockwise pass over groups ``gidx`` of an orthonormalized design."""
    max_change = 0.0
    for g in gidx:
        s = starts[g]
        w = sizes[g]
        Xg = X[:, s:s + w]
        old = beta[s:s + w].copy()
        z = (Xg.T @ r) * inv_n + old
        norm = math.sqrt(float(z @ z))
        thr = lam * math.sqrt(w)
        if norm > thr:
            new = (1.0 - thr / norm) * z
        else:
            new = np.zeros(w)
        delta = new - old
        if np.any(delta != 0.0):
            r -= Xg @ delta
            beta[s:s + w] = new
            m = float(np.max(np.abs(delta)))
            if m > max_change:
                max_change = m
    return max_change


def col_dots(X, r, idx, out, inv_n):
    """``out[j] = x_j^T r / n`` for ``j`` in ``idx``."""
    if len(idx) == 0:
        return
    if len(idx) == X.shape[1]:
        out[idx] = (X.T @ r)[idx] * inv_n
    else:
        out[idx] = (X[:, idx].T @ r) * inv_n


def group_norms(X, r, starts, sizes, gidx, out, inv_n):
    """``out[g] = ||X_g^T r|| / n`` for ``g`` in ``gidx``."""
    for g in gidx:
        s = starts[g]
        v = X[:, s:s + sizes[g]].T @ r
        out[g] = math.sqrt(float(v @ v)) * inv_n
