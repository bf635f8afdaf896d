"""Greedy matching-pursuit baselines for complex dictionaries."""

import numpy as np

from .linalg import as_matrix, as_vector, least_squares


def _top_indices(values, count):
    # Stable sort on the negated magnitudes: ties go to the lowest index.
    order = np.argsort(-values, kind="stable")
    return order[:count]


def omp(y, X, k):
    """Orthogonal matching pursuit.

    Greedily selects the column with the largest absolute correlation to
    the current residual, then refits all selected columns by least
    squares. Assumes unit-norm columns. Ties break toward the lowest
    column index, so the result is deterministic.

    Parameters
    ----------
    y : array_like
        Measurement vector of length n.
    X : array_like
        Dictionary, n x p, column-normalized.
    k : int
        Number of columns to select, below n.

    Returns
    -------
    (support, coef)
        Sorted tuple of ``k`` selected indices and the least-squares
        coefficients aligned with it.
    """
    y = as_vector(y, "y")
    X = as_matrix(X)
    n, p = X.shape
    if y.shape[0] != n:
        raise ValueError(f"X has {n} rows but y has length {y.shape[0]}")
    k = int(k)
    if not 1 <= k <= min(n, p):
        raise ValueError(f"k={k} outside 1..min(n, p)")

    residual = y
    selected = []
    coef = np.zeros(0, dtype=np.complex128)
    for _ in range(k):
        corr = np.abs(X.conj().T @ residual)
        corr[selected] = -1.0  # never re-select
        selected.append(int(np.argmax(corr)))
        cols = X[:, selected]
        coef = least_squares(cols, y)
        residual = y - cols @ coef

    order = np.argsort(selected)
    support = tuple(int(selected[i]) for i in order)
    return support, coef[order]


def cosamp(y, X, k, max_iter=50):
    """Compressive sampling matching pursuit.

    Each sweep merges the ``2k`` columns most correlated with the residual
    into the current support, solves least squares over the merged set (at
    most ``3k`` columns) and prunes back to the ``k`` largest coefficients.
    Iteration stops when the support repeats or after ``max_iter`` sweeps.
    Divergence is not an error: the last iterate is returned as-is, however
    large its refit coefficients have grown.

    Returns
    -------
    (support, coef)
        Sorted tuple of exactly ``k`` indices and the coefficients of the
        final least-squares fit, aligned with the support.
    """
    y = as_vector(y, "y")
    X = as_matrix(X)
    n, p = X.shape
    if y.shape[0] != n:
        raise ValueError(f"X has {n} rows but y has length {y.shape[0]}")
    k = int(k)
    if not 1 <= k <= p:
        raise ValueError(f"k={k} outside 1..p")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    support = np.zeros(0, dtype=np.intp)
    coef = np.zeros(0, dtype=np.complex128)
    residual = y
    for _ in range(max_iter):
        corr = np.abs(X.conj().T @ residual)
        proxy = _top_indices(corr, min(2 * k, p))
        merged = np.union1d(support, proxy)
        fit = least_squares(X[:, merged], y)
        keep = np.sort(_top_indices(np.abs(fit), k))
        new_support = merged[keep]
        coef = fit[keep]
        residual = y - X[:, new_support] @ coef
        if new_support.shape == support.shape and np.array_equal(new_support, support):
            break
        support = new_support

    return tuple(int(i) for i in support), coef
