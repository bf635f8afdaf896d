"""Sequential adaptive elastic net and one-shot adaptive variants.

The sequential scheme runs the pathwise solver three times, shrinking the
sparsity target from ``3k`` over ``2k`` to ``k``. Each stage reweights the
penalty by the reciprocal magnitudes of the previous stage's coefficients,
so variables outside the previous support are excluded (infinite weight)
and strong variables are penalised lightly. The final stage refits the
surviving columns by least squares.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector, least_squares
from .wen import WenSolution, make_alpha_grid, pathwise_wen


class StageFailure(RuntimeError):
    """A stage of the sequential scheme could not reach its sparsity target."""

    def __init__(self, stage, message):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class SaenTrace:
    """Record of one sequential run: stage supports, stage weights, result.

    Supports are nested by construction: the final active set is contained
    in the stage-2 support, which is contained in the stage-1 support.
    """

    stage_supports: tuple
    stage_weights: tuple
    final: WenSolution


def adaptive_weights(beta):
    """Reciprocal-magnitude penalty weights ``1 / |beta|``.

    Zero coefficients receive weight ``+inf``, which excludes the variable
    from later fits.
    """
    mag = np.abs(np.asarray(beta, dtype=np.complex128))
    with np.errstate(divide="ignore"):
        return np.where(mag > 0.0, 1.0 / mag, np.inf)


def _debiased_passthrough(y, X, solution, k):
    """Rebuild a solution as its least-squares refit on its own support."""
    idx = np.asarray(solution.active_set, dtype=np.intp)
    coef = least_squares(X[:, idx], y)
    resid = y - X[:, idx] @ coef
    beta = np.zeros(X.shape[1], dtype=np.complex128)
    beta[idx] = coef
    return WenSolution(
        beta=beta,
        active_set=solution.active_set,
        alpha=solution.alpha,
        lambda_k=solution.lambda_k,
        rss=float(np.real(np.vdot(resid, resid))),
        debiased=True,
        k_requested=int(k),
    )


def _stage(stage_no, y, X, weights, alphas, k, debias, allow_truncated):
    try:
        return pathwise_wen(y, X, weights, alphas, k,
                            debias=debias, allow_truncated=allow_truncated)
    except Exception as exc:
        raise StageFailure(stage_no, str(exc)) from exc


def saen(y, X, alphas, k):
    """Three-stage adaptive recovery of a ``k``-sparse solution.

    Stage 1 solves an unweighted ``3k``-sparse problem; stages 2 and 3
    restrict attention to the previous support via reciprocal-magnitude
    weights and shrink the target to ``2k`` and ``k``. Stalled stages fall
    back to their deepest solution and later targets shrink accordingly;
    only a final stage that cannot reach ``k`` raises.

    Parameters
    ----------
    y, X : array_like
        Snapshot (length n) and dictionary (n x p) with unit-norm columns.
    alphas : sequence
        Elastic-net mixing grid shared by all stages.
    k : int
        Number of sources to recover; requires ``3k <= n`` and ``3k < p``.

    Returns
    -------
    SaenTrace
        Stage supports (nested), the two stage weight vectors and the final
        debiased solution with exactly ``k`` active columns.
    """
    y = as_vector(y, "y")
    X = as_matrix(X)
    n, p = X.shape
    alphas = make_alpha_grid(alphas)
    k = int(k)
    if k < 1:
        raise ValueError("k must be at least 1")
    if 3 * k > n or 3 * k >= p:
        raise ValueError(f"stage-1 target {3 * k} needs 3k <= n and 3k < p")

    ones = np.ones(p)
    init = _stage(1, y, X, ones, alphas, 3 * k, debias=False, allow_truncated=True)
    support_1 = init.active_set

    w_2 = adaptive_weights(init.beta)
    avail = int(np.isfinite(w_2).sum())
    target_2 = min(2 * k, avail)
    if target_2 >= avail:
        mid = init
    else:
        mid = _stage(2, y, X, w_2, alphas, target_2, debias=False,
                     allow_truncated=True)
    support_2 = mid.active_set

    w_3 = adaptive_weights(mid.beta)
    avail = int(np.isfinite(w_3).sum())
    if avail < k:
        raise StageFailure(3, f"only {avail} candidate columns remain, need {k}")
    if avail == k:
        final = _debiased_passthrough(y, X, mid, k)
    else:
        final = _stage(3, y, X, w_3, alphas, k, debias=True,
                       allow_truncated=False)

    return SaenTrace(
        stage_supports=(support_1, support_2, final.active_set),
        stage_weights=(w_2, w_3),
        final=final,
    )


def aen_variant(y, X, alphas, k, kind):
    """One-shot adaptive elastic net with a selectable initial estimator.

    ``kind`` picks the initializer for the reciprocal-magnitude weights:

    - ``"lse"``: minimum-norm least-squares fit on the full dictionary;
    - ``"n"``: solution with as many active columns as there are sensors
      (requires more columns than rows);
    - ``"3k"``: the ``3k``-sparse stage-1 solution, with no further staging.

    The weights feed a single ``k``-sparse solve whose active coefficients
    are least-squares refits.
    """
    y = as_vector(y, "y")
    X = as_matrix(X)
    n, p = X.shape
    alphas = make_alpha_grid(alphas)
    k = int(k)
    ones = np.ones(p)

    if kind == "lse":
        init_beta = least_squares(X, y)
    elif kind == "n":
        if p <= n:
            raise ValueError("sensor-count initializer needs more columns than rows")
        init = pathwise_wen(y, X, ones, alphas, n, debias=False,
                            allow_truncated=True)
        init_beta = init.beta
    elif kind == "3k":
        if 3 * k > n or 3 * k >= p:
            raise ValueError(f"initial target {3 * k} needs 3k <= n and 3k < p")
        init = pathwise_wen(y, X, ones, alphas, 3 * k, debias=False,
                            allow_truncated=True)
        init_beta = init.beta
    else:
        raise ValueError(f"unknown variant {kind!r}; expected 'lse', 'n' or '3k'")

    weights = adaptive_weights(init_beta)
    if int(np.isfinite(weights).sum()) <= k:
        raise StageFailure(2, "initializer left too few candidate columns")
    return pathwise_wen(y, X, weights, alphas, k, debias=True)
