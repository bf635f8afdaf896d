"""Homotopy solver for the complex-valued weighted Lasso.

The solver tracks the penalty values (knots) at which the active set grows
by one variable, together with the solution at every knot. Each step first
predicts the next knot from the linearized motion of the correlations
(least-squares direction plus a per-candidate quadratic crossing), then
corrects: the active-set solution is polished to full stationarity and the
knot is re-located so the best excluded column meets the shrinking penalty
exactly. Without the correction the linear segments drift in phase, which
a real-valued path never does.

The engine works entirely in correlation space: it needs only the vector
of column-response correlations and individual Gram columns, never the
design matrix itself. Weighted problems are reduced to unit-weight ones by
scaling columns with the reciprocal weights and rescaling the solutions
back afterwards; columns with infinite weight are excluded from candidacy
altogether.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import RCOND, as_matrix, as_vector

# Steps below GAMMA_FLOOR * lambda are rejected so round-off never
# re-selects an index that just entered.
GAMMA_FLOOR = 1e-12

# |b|^2 - 1 closer to zero than this makes the step equation linear.
_QUAD_EPS = 1e-12

# Knot acceptance: entering-column correlation within this fraction of the
# previous knot value.
_KNOT_TOL = 1e-9

# Stationarity tolerance of the active-set polish, relative to the problem
# scale.
_POLISH_TOL = 1e-12


class PathStallError(RuntimeError):
    """No candidate column can enter the active set at a positive step."""


@dataclass(frozen=True)
class KnotPath:
    """Knots, solutions and active sets produced by one homotopy run.

    ``lambdas[k]`` is the k-th knot, ``betas[k]`` the solution at that knot
    in the original (unweighted) coordinates and ``active_sets[k]`` the
    active columns in entry order, so ``len(active_sets[k]) == k``. Index 0
    is the all-zero solution at the entry penalty. Knots decrease strictly;
    the final knot may be exactly zero when the residual is fully explained
    before another column can enter. ``anomaly`` marks runs where an active
    coefficient collapsed toward zero between knots (a variable that wants
    to leave the active set; it is flagged, never dropped) or where the
    stationarity polish failed to settle.
    """

    lambdas: np.ndarray
    betas: np.ndarray
    active_sets: tuple
    requested_k: int
    stalled: bool
    ill_conditioned: bool
    anomaly: bool

    @property
    def k_reached(self):
        """Largest sparsity level with a recorded knot."""
        return len(self.lambdas) - 1


def next_knot(c, b, lambda_prev, candidates):
    """Smallest step ``gamma`` at which a candidate joins the active set.

    Along the current direction the residual correlation of candidate ``l``
    evolves as ``c_l - gamma * b_l`` while the penalty shrinks to
    ``lambda_prev - gamma``; the crossing points solve
    ``A g^2 + B g + C = 0`` with ``A = |b|^2 - 1``,
    ``B = 2*lambda_prev - 2*Re(c * conj(b))`` and ``C = |c|^2 - lambda_prev^2``.
    Per candidate the step is the smaller root when both are positive and
    the positive part of the larger one otherwise; the entering variable
    minimises the step, ties breaking toward the lowest column index.

    Parameters
    ----------
    c : ndarray
        Residual correlations of the candidate columns.
    b : ndarray
        Projections of the candidate columns onto the update direction.
    lambda_prev : float
        Penalty at the previous knot, positive.
    candidates : ndarray
        Column indices matching ``c`` and ``b``, in increasing order.

    Returns
    -------
    (gamma, index)
        Accepted step and the entering column; the knot is
        ``lambda_prev - gamma``.

    Raises
    ------
    PathStallError
        When no candidate admits a positive real step.
    """
    c = np.asarray(c, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    candidates = np.asarray(candidates, dtype=np.intp)
    if not (c.shape == b.shape == candidates.shape):
        raise ValueError("c, b and candidates must have matching shapes")
    if candidates.size == 0:
        raise PathStallError("no candidate columns remain")
    if not lambda_prev > 0.0:
        raise ValueError("lambda_prev must be positive")

    quad_a = np.abs(b) ** 2 - 1.0
    quad_b = 2.0 * lambda_prev - 2.0 * np.real(c * np.conj(b))
    quad_c = np.abs(c) ** 2 - lambda_prev**2

    gamma = np.full(c.shape, np.inf)

    linear = np.abs(quad_a) < _QUAD_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        g_lin = np.where(np.abs(quad_b) > 0.0, -quad_c / quad_b, np.inf)
    gamma[linear] = np.where(g_lin[linear] > 0.0, g_lin[linear], np.inf)

    disc = quad_b**2 - 4.0 * quad_a * quad_c
    quad = (~linear) & (disc >= 0.0)
    if np.any(quad):
        sq = np.sqrt(disc[quad])
        # Sign-aware form avoids cancellation when B^2 dominates 4AC.
        q = -0.5 * (quad_b[quad] + np.copysign(sq, quad_b[quad]))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(q != 0.0, q / quad_a[quad], 0.0)
            r2 = np.where(q != 0.0, quad_c[quad] / q, 0.0)
        both = (r1 > 0.0) & (r2 > 0.0)
        g = np.where(both, np.minimum(r1, r2), np.maximum(np.maximum(r1, r2), 0.0))
        gamma[quad] = np.where(g > 0.0, g, np.inf)

    # A crossing beyond the zero-penalty point cannot exist; values that
    # barely overshoot lambda_prev are round-off and get clamped.
    gamma[gamma <= GAMMA_FLOOR * lambda_prev] = np.inf
    gamma[gamma > lambda_prev * (1.0 + 1e-9)] = np.inf
    near = np.isfinite(gamma) & (gamma > lambda_prev)
    gamma[near] = lambda_prev

    pos = int(np.argmin(gamma))
    if not np.isfinite(gamma[pos]):
        raise PathStallError("no candidate admits a positive step")
    return float(gamma[pos]), int(candidates[pos])


def _solve_gram(gram, rhs):
    """Solve the active-set Gram system, falling back to a pseudo-inverse.

    Returns ``(solution, ill_conditioned)``; the fallback uses the RCOND
    singular-value cutoff so coherent active sets never raise.
    """
    try:
        sol = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        sol = None
    if sol is not None and np.all(np.isfinite(sol)):
        resid = np.abs(gram @ sol - rhs).max()
        if resid <= 1e-8 * (np.abs(rhs).max() + 1e-30):
            return sol, False
    sol, _, _, _ = np.linalg.lstsq(gram, rhs, rcond=RCOND)
    return sol, True


def _soft(z, threshold):
    mag = abs(z)
    if mag <= threshold:
        return 0.0 + 0.0j
    return z * (1.0 - threshold / mag)


def _subproblem_cd(gram, cy, lam, warm, max_sweeps=5000, tol=1e-13):
    """Complex coordinate descent on the active-set problem.

    Gram-based: one coordinate update is a closed-form complex
    soft-threshold. Globally convergent, used as the safety net when the
    Newton polish does not settle. Returns ``(beta, converged)``.
    """
    k = cy.shape[0]
    beta = warm.astype(np.complex128).copy()
    diag = np.real(np.diag(gram)).copy()
    diag[diag <= 0.0] = 1e-30
    u = cy - gram @ beta
    scale = max(float(np.abs(cy).max()), lam, 1e-30)
    for _ in range(max_sweeps):
        biggest = 0.0
        for j in range(k):
            old = beta[j]
            rho = u[j] + diag[j] * old
            new = _soft(rho, lam) / diag[j]
            step = new - old
            if step != 0.0:
                beta[j] = new
                u -= gram[:, j] * step
                biggest = max(biggest, abs(step))
        if biggest <= tol * scale:
            return beta, True
    return beta, False


def _stationarity_gap(u, beta, lam, scale):
    """Worst violation of the subproblem optimality conditions.

    ``u`` holds the residual correlations ``cy - G beta``. Nonzero
    coefficients need ``u_j = lam * beta_j/|beta_j|``; zero ones need
    ``|u_j| <= lam``.
    """
    mag = np.abs(beta)
    live = mag > 1e-14 * scale
    n_live = int(np.count_nonzero(live))
    if n_live == mag.size:
        return float(np.abs(u - lam * beta / mag).max())
    gap = 0.0
    if n_live:
        gap = float(np.abs(u[live] - lam * beta[live] / mag[live]).max())
    gap = max(gap, float(max(np.abs(u[~live]).max() - lam, 0.0)))
    return gap


def _polish_active(gram, cy, lam, warm, rtol=_POLISH_TOL):
    """Full stationarity on the active set at penalty ``lam``.

    Damped Newton on ``G beta + lam * phase(beta) = cy`` over the real and
    imaginary parts, with coordinate-wise soft-threshold updates to move
    coefficients on and off zero between Newton steps. Falls back to
    coordinate descent when Newton does not settle. Returns
    ``(beta, ill_conditioned, converged)``.
    """
    if lam <= 0.0:
        beta, ill = _solve_gram(gram, cy)
        return beta, ill, True

    k = cy.shape[0]
    scale = max(float(np.abs(cy).max()), lam)
    beta = warm.astype(np.complex128).copy()
    g_re = gram.real
    g_im = gram.imag
    diag = np.real(np.diag(gram)).copy()
    diag[diag <= 0.0] = 1e-30
    tol = rtol * scale
    zero_floor = 1e-14 * scale

    u = cy - gram @ beta
    gap_prev = np.inf
    for _ in range(50):
        # Scalar re-thresholding lets coefficients leave or rejoin zero,
        # which the smooth Newton step cannot do.
        moved = False
        for j in range(k):
            if abs(beta[j]) > zero_floor:
                continue
            rho = u[j] + diag[j] * beta[j]
            new = _soft(rho, lam) / diag[j]
            step = new - beta[j]
            if step != 0.0:
                beta[j] = new
                u -= gram[:, j] * step
                moved = True

        gap = _stationarity_gap(u, beta, lam, scale)
        if gap <= tol:
            return beta, False, True
        if not moved and gap > 0.5 * gap_prev and gap_prev < np.inf:
            break  # stagnating: hand over to coordinate descent
        gap_prev = gap

        mag = np.abs(beta)
        free = mag > zero_floor
        if not np.any(free):
            break
        idx = np.flatnonzero(free)
        f = idx.size
        if f == k:
            re_sub, im_sub = g_re, g_im
            s = beta / mag
            resid = lam * s - u
        else:
            re_sub = g_re[np.ix_(idx, idx)]
            im_sub = g_im[np.ix_(idx, idx)]
            s = beta[idx] / mag[idx]
            resid = lam * s - u[idx]
        rhs = -np.concatenate([resid.real, resid.imag])

        jac = np.empty((2 * f, 2 * f))
        jac[:f, :f] = re_sub
        jac[f:, f:] = re_sub
        jac[:f, f:] = -im_sub
        jac[f:, :f] = im_sub
        ratio = lam / mag[idx]
        sr = s.real
        si = s.imag
        rng = np.arange(f)
        jac[rng, rng] += ratio * (1.0 - sr * sr)
        jac[f + rng, f + rng] += ratio * (1.0 - si * si)
        jac[rng, f + rng] += ratio * (-sr * si)
        jac[f + rng, rng] += ratio * (-sr * si)

        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            break
        d_beta = step[:f] + 1j * step[f:]

        # Backtrack on the stationarity gap so wild steps never take hold.
        accepted = False
        for damp in (1.0, 0.5, 0.25, 0.125):
            trial = beta.copy()
            trial[idx] = beta[idx] + damp * d_beta
            u_trial = cy - gram @ trial
            if _stationarity_gap(u_trial, trial, lam, scale) < gap:
                beta = trial
                u = u_trial
                accepted = True
                break
        if not accepted:
            break

    beta, converged = _subproblem_cd(gram, cy, lam, beta)
    return beta, False, converged


def _locate_knot(gram, gram_cols, corr0, rows, cand, lam_prev, corr_prev, beta_warm):
    """Find the next knot from the corrected state at the previous knot.

    Evaluating a penalty value means polishing the active solution there
    and measuring ``h = max |candidate correlation| - penalty``; ``h`` is
    negative just below the previous knot and nonnegative at zero penalty,
    so a root always exists. A quadratic crossing from the current polished
    state proposes the next value; a shrinking bracket with bisection
    guards the proposals.

    Returns ``(lam, beta, corr, entering, ill, anomaly)`` where ``corr`` is
    the full correlation vector at the accepted knot and ``entering`` is
    None when the path terminates at zero penalty.
    """
    k = rows.size
    ill = False
    anomaly = False

    def evaluate(lam, warm):
        nonlocal ill, anomaly
        beta, bad, converged = _polish_active(gram, corr0[rows], lam, warm)
        ill = ill or bad
        anomaly = anomaly or not converged
        corr = corr0 - gram_cols[:, :k] @ beta
        h = float(np.abs(corr[cand]).max() - lam)
        return beta, corr, h

    def quad_step(lam, corr_now):
        nonlocal ill
        delta, bad = _solve_gram(gram, corr_now[rows])
        ill = ill or bad
        proj = gram_cols[:, :k] @ (delta / lam)
        try:
            gamma, _ = next_knot(corr_now[cand], proj[cand], lam, cand)
        except PathStallError:
            return None
        return max(lam - gamma, 0.0)

    scale = lam_prev
    lo, h_lo = 0.0, None        # h(0) >= 0 always
    hi, h_hi = lam_prev, None   # h just below the previous knot is negative

    lam = quad_step(lam_prev, corr_prev)
    if lam is None:
        lam = 0.5 * lam_prev
    beta, corr, h = evaluate(lam, beta_warm)
    found = False

    for _ in range(60):
        if abs(h) <= _KNOT_TOL * scale:
            found = True
            break
        if h > 0.0:
            lo, h_lo = lam, h  # crossed already: the knot lies above lam
        else:
            hi, h_hi = lam, h  # not crossed yet: the knot lies below lam
        if hi - lo <= 1e-14 * scale:
            break
        proposal = None
        if h < 0.0 and lam > 0.0:
            proposal = quad_step(lam, corr)
        if (proposal is None or not lo < proposal < hi) and (
            h_lo is not None and h_hi is not None
        ):
            # False position on the bracketed sign change.
            proposal = (lo * h_hi - hi * h_lo) / (h_hi - h_lo)
        if proposal is None or not lo < proposal < hi:
            proposal = 0.5 * (lo + hi)
        lam = proposal
        beta, corr, h = evaluate(lam, beta)

    if not found:
        if lo == 0.0:
            # Bracket collapsed onto zero penalty: terminal knot.
            lam = 0.0
            beta, corr, h = evaluate(lam, beta)
            anomaly = anomaly or h > 1e-6 * scale
        else:
            anomaly = anomaly or abs(h) > 1e-6 * max(lam, 1e-12 * scale)

    if lam >= lam_prev * (1.0 - GAMMA_FLOOR):
        raise PathStallError("knot did not decrease: tied or re-entering column")

    if lam == 0.0:
        entering = None
    else:
        entering = int(cand[int(np.argmax(np.abs(corr[cand])))])
    return lam, beta, corr, entering, ill, anomaly


def _knot_path_engine(corr0, gram_col, k):
    """Predictor-corrector homotopy in correlation space.

    Parameters
    ----------
    corr0 : ndarray
        Correlations of every column with the response, ``X^H y``.
    gram_col : callable
        ``gram_col(j)`` returns column ``j`` of the Gram matrix ``X^H X``.
    k : int
        Number of knots to compute past the entry penalty.

    Returns the raw path in the engine's coordinates; callers handle weight
    scaling and index mapping.
    """
    p = corr0.shape[0]
    corr0 = np.asarray(corr0, dtype=np.complex128)
    corr = corr0.copy()
    lam = float(np.abs(corr).max())

    lambdas = [lam]
    betas = [np.zeros(p, dtype=np.complex128)]
    actives = [()]
    ill = False
    anomaly = False
    stalled = False

    if lam <= 0.0:
        return KnotPath(np.asarray(lambdas), np.asarray(betas), tuple(actives),
                        requested_k=k, stalled=k > 0, ill_conditioned=False,
                        anomaly=False)

    j_next = int(np.argmax(np.abs(corr)))
    active = []
    gram_cols = np.empty((p, k), dtype=np.complex128)
    beta_active = np.zeros(0, dtype=np.complex128)
    in_active = np.zeros(p, dtype=bool)

    for step in range(1, k + 1):
        active.append(j_next)
        in_active[j_next] = True
        gram_cols[:, step - 1] = gram_col(j_next)
        rows = np.asarray(active, dtype=np.intp)
        gram = gram_cols[rows, :step]
        cand = np.flatnonzero(~in_active)
        beta_warm = np.append(beta_active, 0.0)

        try:
            lam_new, beta_active, corr, j_next, bad, odd = _locate_knot(
                gram, gram_cols, corr0, rows, cand, lam, corr, beta_warm
            )
        except PathStallError:
            stalled = True
            break
        ill = ill or bad
        anomaly = anomaly or odd

        mags = np.abs(beta_active)
        if mags.size and mags.min() <= 1e-9 * (mags.max() + 1e-300):
            anomaly = True  # an active coefficient collapsed: flagged, not dropped

        beta = np.zeros(p, dtype=np.complex128)
        beta[rows] = beta_active
        lambdas.append(lam_new)
        betas.append(beta)
        actives.append(tuple(active))

        if j_next is None or lam_new <= 0.0:
            # Zero penalty reached: the path cannot continue past this knot.
            stalled = step < k
            break
        lam = lam_new

    return KnotPath(
        lambdas=np.asarray(lambdas, dtype=float),
        betas=np.asarray(betas, dtype=np.complex128),
        active_sets=tuple(actives),
        requested_k=k,
        stalled=stalled,
        ill_conditioned=ill,
        anomaly=anomaly,
    )


def validate_weights(weights, p):
    """Check a penalty weight vector: positive or +inf, at least one finite."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (p,):
        raise ValueError(f"weights must have shape ({p},), got {w.shape}")
    if np.any(np.isnan(w)):
        raise ValueError("weights contain NaN")
    if np.any(w <= 0.0):
        raise ValueError("weights must be strictly positive (or +inf to exclude)")
    if not np.any(np.isfinite(w)):
        raise ValueError("at least one weight must be finite")
    return w


def weighted_lasso_path(y, X, weights, k):
    """Knot path of the complex weighted Lasso down to sparsity ``k``.

    The design is scaled column-wise by the reciprocal weights, the
    unit-weight homotopy is run on the scaled problem and the recorded
    solutions are divided element-wise by the weights so they apply to the
    original design. Columns with weight ``+inf`` are excluded before the
    transform.

    Parameters
    ----------
    y : array_like
        Response vector of length n.
    X : array_like
        Design matrix, n x p. Interpreting knots as correlation levels
        assumes the weight-scaled columns have unit norm; the solver itself
        does not require it.
    weights : array_like
        Positive penalty weights, ``+inf`` allowed.
    k : int
        Target sparsity; needs ``k <= n`` and at least ``k + 1`` columns
        with finite weight.

    Returns
    -------
    KnotPath
        ``k + 1`` knot/solution/active-set triples when the path completes;
        a shorter path flagged ``stalled`` otherwise.
    """
    y = as_vector(y, "y")
    X = as_matrix(X)
    n_rows, p = X.shape
    if y.shape[0] != n_rows:
        raise ValueError(f"X has {n_rows} rows but y has length {y.shape[0]}")
    w = validate_weights(weights, p)
    k = int(k)

    finite = np.isfinite(w)
    keep = np.flatnonzero(finite)
    if not 1 <= k <= n_rows:
        raise ValueError(f"target sparsity {k} outside 1..{n_rows}")
    if k >= keep.size:
        raise ValueError(
            f"target sparsity {k} needs more than {keep.size} finite-weight columns"
        )

    unit = bool(np.all(w[keep] == 1.0))
    X_sub = X[:, keep]
    X_t = X_sub if unit else X_sub / w[keep]

    corr0 = X_t.conj().T @ y
    herm = X_t.conj().T

    def gram_col(j):
        return herm @ X_t[:, j]

    path = _knot_path_engine(corr0, gram_col, k)

    m = path.betas.shape[0]
    betas = np.zeros((m, p), dtype=np.complex128)
    if unit:
        betas[:, keep] = path.betas
    else:
        betas[:, keep] = path.betas / w[keep]
    actives = tuple(tuple(int(keep[j]) for j in a) for a in path.active_sets)

    return KnotPath(
        lambdas=path.lambdas,
        betas=betas,
        active_sets=actives,
        requested_k=k,
        stalled=path.stalled,
        ill_conditioned=path.ill_conditioned,
        anomaly=path.anomaly,
    )
