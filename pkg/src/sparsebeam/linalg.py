"""Dense complex linear algebra helpers shared by all solvers.

Everything here works on plain numpy arrays (dtype complex128), treats its
inputs as immutable and is safe to call concurrently.
"""

import numpy as np

# Singular values below RCOND * sigma_max count as zero in least-squares
# solves; active sets can contain nearly coherent columns.
RCOND = 1e-10


def as_vector(x, name="x"):
    """Coerce to a 1-D complex128 array, rejecting NaN/Inf entries."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def as_matrix(x, name="X"):
    """Coerce to a 2-D complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def hermitian_inner(a, b):
    """Hermitian inner product conj(a) . b (conjugate on the first argument)."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.vdot(a, b))


def least_squares(X, y):
    """Minimum-norm least-squares solution of ``X s ~ y``.

    Rank deficiency is handled through the pseudo-inverse with singular
    values below ``RCOND * sigma_max`` treated as zero, so nearly collinear
    column sets never raise.
    """
    X = as_matrix(X)
    y = as_vector(y, "y")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has length {y.shape[0]}")
    sol, _, _, _ = np.linalg.lstsq(X, y, rcond=RCOND)
    return sol


def normalize_columns(X):
    """Scale every column of ``X`` to unit l2 norm.

    Returns ``(X_unit, scales)`` where ``scales`` holds the original column
    norms, so ``X_unit * scales`` reproduces ``X``.
    """
    X = as_matrix(X)
    scales = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(scales == 0.0)
    if zero.size:
        raise ValueError(f"column {int(zero[0])} has zero norm")
    return X / scales, scales
