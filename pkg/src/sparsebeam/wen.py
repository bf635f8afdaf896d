"""Pathwise weighted elastic net solved at the knots of the penalty path.

For the pure l1 end of the grid the weighted Lasso homotopy is run
directly. Every other mixing value reuses the previous value's knots to
set the ridge level, rewrites the problem in augmented form (design
stacked over a scaled identity) and extracts each knot from a fresh
homotopy run on the augmented data. Among the per-value solutions the one
whose debiased least-squares refit leaves the smallest residual sum of
squares wins.
"""

import math
from dataclasses import dataclass

import numpy as np

from .lars import PathStallError, _knot_path_engine, validate_weights
from .linalg import as_matrix, as_vector, least_squares

#: Mixing grid 1.00, 0.95, ..., 0.05: l1-only down to strongly ridge-like.
DEFAULT_ALPHA_GRID = tuple(np.linspace(1.0, 0.05, 20))


def make_alpha_grid(values=None):
    """Validate a grid of elastic-net mixing values.

    The grid must start at exactly 1 (pure l1) and decrease strictly
    within (0, 1].
    """
    if values is None:
        values = DEFAULT_ALPHA_GRID
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("alpha grid must be a non-empty 1-D sequence")
    if grid[0] != 1.0:
        raise ValueError("alpha grid must start at exactly 1.0")
    if np.any(grid <= 0.0) or np.any(grid > 1.0):
        raise ValueError("alpha values must lie in (0, 1]")
    if np.any(np.diff(grid) >= 0.0):
        raise ValueError("alpha grid must decrease strictly")
    return grid


def augment(X, eta):
    """Stack ``X`` over ``sqrt(eta) * I`` for the ridge-as-rows rewrite.

    Returns the ``(n + p) x p`` stacked matrix together with a function
    that pads a length-n response with ``p`` zeros. With ``eta = 0`` the
    bottom block is identically zero and the rewrite collapses to the
    original l1 problem.
    """
    X = as_matrix(X)
    if eta < 0.0:
        raise ValueError("eta must be nonnegative")
    n, p = X.shape
    stacked = np.zeros((n + p, p), dtype=np.complex128)
    stacked[:n] = X
    np.fill_diagonal(stacked[n:], math.sqrt(eta))

    def pad(y):
        y = as_vector(y, "y")
        if y.shape[0] != n:
            raise ValueError(f"response length {y.shape[0]} does not match {n} rows")
        return np.concatenate([y, np.zeros(p, dtype=np.complex128)])

    return stacked, pad


def lambda_max(y, X, weights, alpha):
    """Smallest penalty at which the solution is identically zero.

    Closed form: ``max_j |<x_j, y> / w_j| / alpha`` over the finite-weight
    columns.
    """
    y = as_vector(y, "y")
    X = as_matrix(X)
    w = validate_weights(weights, X.shape[1])
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    finite = np.isfinite(w)
    corr = np.abs(X[:, finite].conj().T @ y) / w[finite]
    return float(corr.max()) / alpha


@dataclass(frozen=True)
class WenSolution:
    """A k-sparse elastic-net solution at the final knot.

    ``beta`` lives in the original p-dimensional coordinates, ``active_set``
    is sorted ascending and ``rss`` is the residual sum of squares of the
    least-squares refit on the active columns (the quantity that selected
    ``alpha``). ``truncated`` marks best-effort results whose path stalled
    before the requested sparsity.
    """

    beta: np.ndarray
    active_set: tuple
    alpha: float
    lambda_k: float
    rss: float
    debiased: bool
    k_requested: int

    @property
    def truncated(self):
        return len(self.active_set) < self.k_requested


@dataclass
class _Candidate:
    """One mixing value's best-effort result along the warm-start chain."""

    alpha: float
    depth: int
    lambdas: list
    etas: list   # ridge level of the augmented problem solved per level
    knots: list  # (lambda, beta in original coords, active set) per level
    rss: float


def _augmented_gram_col(gram0, ridge_diag):
    """Gram column provider of the weight-scaled augmented design.

    Stacking the scaled design over ``sqrt(eta) * diag(1/w)`` only shifts
    the Gram diagonal by ``eta / w^2`` and leaves the response correlations
    untouched (the padded rows of the response are zero), so the augmented
    homotopy never needs the stacked matrix itself.
    """

    def gram_col(j):
        col = gram0[:, j].copy()
        col[j] += ridge_diag[j]
        return col

    return gram_col


def _to_original(beta_t, inv_w, keep, p):
    out = np.zeros(p, dtype=np.complex128)
    out[keep] = beta_t * inv_w
    return out


def _refit_rss(y, X, active):
    cols = X[:, np.asarray(active, dtype=np.intp)]
    coef = least_squares(cols, y)
    resid = y - cols @ coef
    return float(np.real(np.vdot(resid, resid))), coef


def pathwise_wen_candidates(y, X, weights, alphas, k):
    """Per-mixing-value solutions at the requested sparsity level.

    Returns the candidate list in grid order. Each candidate records the
    depth its warm-start chain reached, the knot values and per-knot
    solutions, and the refit residual at its deepest knot. Values whose
    chain stalls early keep their deepest solution but do not advance the
    warm-start chain.
    """
    y = as_vector(y, "y")
    X = as_matrix(X)
    n, p = X.shape
    if y.shape[0] != n:
        raise ValueError(f"X has {n} rows but y has length {y.shape[0]}")
    w = validate_weights(weights, p)
    alphas = make_alpha_grid(alphas)
    k = int(k)

    keep = np.flatnonzero(np.isfinite(w))
    if not 1 <= k <= n:
        raise ValueError(f"target sparsity {k} outside 1..{n}")
    if k >= keep.size:
        raise ValueError(
            f"target sparsity {k} needs more than {keep.size} finite-weight columns"
        )

    unit = bool(np.all(w[keep] == 1.0))
    inv_w = np.ones(keep.size) if unit else 1.0 / w[keep]
    X_t = X[:, keep] if unit else X[:, keep] * inv_w

    # One Gram and one correlation vector serve every homotopy run below.
    gram0 = X_t.conj().T @ X_t
    corr0 = X_t.conj().T @ y
    inv_w_sq = inv_w * inv_w

    candidates = []

    # Pure l1 leg: one direct homotopy supplies the initial knots.
    path = _knot_path_engine(corr0, lambda j: gram0[:, j].copy(), k)
    depth = path.k_reached
    knots = []
    for level in range(depth + 1):
        beta = _to_original(path.betas[level], inv_w, keep, p)
        active = tuple(int(keep[j]) for j in path.active_sets[level])
        knots.append((float(path.lambdas[level]), beta, active))
    if depth >= 1:
        rss, _ = _refit_rss(y, X, knots[depth][2])
        candidates.append(
            _Candidate(alpha=1.0, depth=depth,
                       lambdas=[lam for lam, _, _ in knots[1:]],
                       etas=[0.0] * depth, knots=knots, rss=rss)
        )
        chain = candidates[-1].lambdas
    else:
        chain = []

    for alpha in alphas[1:]:
        if not chain:
            break
        lam_here = []
        etas = []
        knots = []
        ok = True
        for level in range(1, len(chain) + 1):
            eta = chain[level - 1] * (1.0 - alpha)
            gram_col = _augmented_gram_col(gram0, eta * inv_w_sq)
            sub = _knot_path_engine(corr0, gram_col, level)
            if sub.k_reached < level:
                ok = False
                break
            gamma_level = float(sub.lambdas[level])
            lam_here.append(gamma_level / alpha)
            etas.append(eta)
            if level == 1:
                knots.append((float(sub.lambdas[0]) / alpha,
                              np.zeros(p, dtype=np.complex128), ()))
            beta = _to_original(sub.betas[level], inv_w, keep, p)
            active = tuple(int(keep[j]) for j in sub.active_sets[level])
            knots.append((gamma_level / alpha, beta, active))
        depth = len(lam_here)
        if depth >= 1:
            rss, _ = _refit_rss(y, X, knots[depth][2])
            candidates.append(
                _Candidate(alpha=float(alpha), depth=depth,
                           lambdas=lam_here, etas=etas, knots=knots, rss=rss)
            )
        if ok:
            chain = lam_here

    return candidates


def pathwise_wen(y, X, weights, alphas, k, debias=False, allow_truncated=False):
    """K-sparse weighted elastic-net solution with data-driven mixing.

    Runs the knot-path solver across the mixing grid and returns the
    candidate whose least-squares refit has the smallest residual sum of
    squares; ties go to the larger (sparser-leaning) mixing value. With
    ``debias`` the active coefficients are replaced by that refit.

    Parameters
    ----------
    y, X : array_like
        Response (length n) and design (n x p).
    weights : array_like
        Positive penalty weights, ``+inf`` excludes a column.
    alphas : sequence
        Mixing grid, validated by :func:`make_alpha_grid`.
    k : int
        Requested sparsity of the returned solution.
    debias : bool
        Replace active coefficients by the least-squares refit.
    allow_truncated : bool
        Return the deepest available solution instead of raising when every
        mixing value stalls before ``k``.

    Raises
    ------
    PathStallError
        All mixing values stalled and ``allow_truncated`` is unset, or no
        value produced any knot at all.
    """
    candidates = pathwise_wen_candidates(y, X, weights, alphas, k)
    if not candidates:
        raise PathStallError("no mixing value produced a first knot")

    best_depth = max(c.depth for c in candidates)
    if best_depth < k and not allow_truncated:
        stalls = {f"{c.alpha:g}": c.depth for c in candidates}
        raise PathStallError(
            f"every mixing value stalled before sparsity {k}: depths {stalls}"
        )

    pool = [c for c in candidates if c.depth == best_depth]
    chosen = min(pool, key=lambda c: c.rss)  # min is stable: ties keep the larger alpha
    lam, beta, active = chosen.knots[chosen.depth]
    active_sorted = tuple(sorted(active))

    rss, refit = _refit_rss(y, X, active_sorted)
    if debias:
        beta = np.zeros_like(beta)
        beta[np.asarray(active_sorted, dtype=np.intp)] = refit

    return WenSolution(
        beta=beta,
        active_set=active_sorted,
        alpha=chosen.alpha,
        lambda_k=lam,
        rss=rss,
        debiased=bool(debias),
        k_requested=int(k),
    )


def wen_path(y, X, weights, alphas, k):
    """Knot sequence of the last grid value, for path inspection.

    Returns a list of ``(lambda, beta, active_set)`` triples from the entry
    penalty down to the deepest knot the chain reached for the final value
    in ``alphas``.
    """
    candidates = pathwise_wen_candidates(y, X, weights, alphas, k)
    if not candidates:
        raise PathStallError("no mixing value produced a first knot")
    target = float(make_alpha_grid(alphas)[-1])
    for cand in candidates:
        if cand.alpha == target:
            return cand.knots
    raise PathStallError(f"mixing value {target:g} stalled before its first knot")
