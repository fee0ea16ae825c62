"""Dense linear-algebra backend: orthonormalization, least squares, norms.

Thin wrappers over numpy.linalg that pin down the tolerance policy used
everywhere else in the package: tolerances are relative to input magnitudes
with an absolute floor of 1e-14.
"""

import numpy as np

from .errors import BadParameter, NoConvergence, RankDeficient

ABS_FLOOR = 1e-14
RANK_RTOL = 1e-12


def as_matrix(a):
    """Coerce to a 2-d float64 array; reject NaN/Inf and empty shapes."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise BadParameter(f"expected a matrix, got {m.ndim}-d data")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise BadParameter(f"matrix must have at least one row and column, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise BadParameter("matrix entries must be finite")
    return m


def orthonormalize(columns):
    """Orthonormal basis for the column span, in Gram-Schmidt orientation.

    The k-th output column lies in the span of the first k input columns
    and has positive inner product with the k-th Gram-Schmidt direction
    (QR with the R-diagonal forced positive). Raises RankDeficient if the
    numerical rank falls below the column count.
    """
    a = as_matrix(columns)
    tol = max(RANK_RTOL * np.max(np.linalg.norm(a, axis=0)), ABS_FLOOR)
    s = np.linalg.svd(a, compute_uv=False)
    if a.shape[0] < a.shape[1] or np.sum(s > tol) < a.shape[1]:
        raise RankDeficient(f"columns are not independent to tolerance {tol:.3e}")
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def lstsq_solve(a, b):
    """Minimize the Frobenius norm of A @ X - B via orthogonal factorization.

    A must have full column rank to tolerance; never forms (A^T A)^-1.
    """
    a = as_matrix(a)
    b_arr = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(b_arr)):
        raise BadParameter("right-hand side entries must be finite")
    rhs = b_arr[:, None] if b_arr.ndim == 1 else b_arr
    if rhs.shape[0] != a.shape[0]:
        raise BadParameter(f"shape mismatch: A has {a.shape[0]} rows, B has {rhs.shape[0]}")
    x, _, rank, _ = np.linalg.lstsq(a, rhs, rcond=RANK_RTOL)
    if rank < a.shape[1]:
        raise RankDeficient(f"numerical rank {rank} < {a.shape[1]} columns")
    return x[:, 0] if b_arr.ndim == 1 else x


def spectral_norm(a):
    """Largest singular value."""
    a = as_matrix(a)
    try:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"SVD did not converge: {exc}") from exc
