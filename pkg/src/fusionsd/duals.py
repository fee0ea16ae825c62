"""Left inverses of the analysis operator and quantization-error diagnostics.

Any map L on stacked blocks with L T = I reconstructs unquantized
measurements exactly; the reconstruction error of a quantized stream is
then literally L (y - q). The canonical choice S^{-1} T^T minimizes nothing
about the loop's error; the order-matched alternative conjugates the
pseudo-inverse by the inverse difference power,
    L = pinv(M) (difference)^{-r}  with  M = (difference)^{-r} T,
which absorbs r orders of the shaped error and is what the decay
experiments measure.
"""

import math
import warnings

import numpy as np
import scipy.linalg

from . import linalg
from .block_ops import (apply_difference_transpose, cofactor_norm,
                        solve_difference, solve_difference_transpose)
from .errors import BadParameter, DimensionMismatch, IllConditionedWarning, RankDeficient
from .frames import require_frame

COND_WARN = 1e12


class LeftInverse:
    """A d x (N d) map on stacked blocks with L T = I."""

    def __init__(self, frame, matrix, kind):
        matrix = np.asarray(matrix, dtype=float)
        expected = (frame.ambient_dim, len(frame) * frame.ambient_dim)
        if matrix.shape != expected:
            raise DimensionMismatch(f"expected shape {expected}, got {matrix.shape}")
        self.frame = frame
        self.matrix = matrix
        self.kind = kind

    def reconstruct(self, w):
        if w.n_blocks != len(self.frame) or w.ambient_dim != self.frame.ambient_dim:
            raise DimensionMismatch("block vector does not match the frame")
        return self.matrix @ w.stacked

    def composition_defect(self):
        """max-norm of L T - I; at rounding level for a correct inverse."""
        t = self.frame.analysis_matrix()
        return float(np.max(np.abs(self.matrix @ t - np.eye(self.frame.ambient_dim))))

    def __repr__(self):
        return f"LeftInverse(kind={self.kind}, n_blocks={len(self.frame)})"


def canonical_left_inverse(frame):
    """S^{-1} T^T via a symmetric solve (no explicit inverse of S)."""
    require_frame(frame)
    t = frame.analysis_matrix()
    s = frame.frame_operator()
    return LeftInverse(frame, np.linalg.solve(s, t.T), "canonical")


def sobolev_left_inverse(frame, order):
    """Order-matched left inverse pinv(M) (difference)^{-r}, M = (difference)^{-r} T.

    Assembled from a QR factorization of M, with both inverse difference
    powers applied by substitution: M itself by r forward sweeps on the
    analysis blocks, and Q^T (difference)^{-r} as r backward sweeps on Q.
    Never forms M^T M or a dense inverse power. order = 0 degenerates to
    the plain pseudo-inverse of T (useful as a cross-check, not used by the
    experiments).
    """
    require_frame(frame)
    r = int(order)
    if r < 0:
        raise BadParameter("order must be nonnegative")
    n, d = len(frame), frame.ambient_dim
    blocks = frame.analysis_matrix().reshape(n, d, d)
    for _ in range(r):
        blocks = solve_difference(frame, blocks)
    m = blocks.reshape(n * d, d)
    q, rr = np.linalg.qr(m)
    diag = np.abs(np.diag(rr))
    if diag.min() <= linalg.RANK_RTOL * max(diag.max(), linalg.ABS_FLOOR):
        raise RankDeficient("the difference-weighted analysis operator lost column rank")
    cond = diag.max() / diag.min()
    if cond > COND_WARN:
        warnings.warn(f"difference-weighted analysis operator has condition estimate "
                      f"{cond:.3e}; reconstruction may lose digits", IllConditionedWarning)
    z = q.reshape(n, d, d)
    for _ in range(r):
        z = solve_difference_transpose(frame, z)
    matrix = scipy.linalg.solve_triangular(rr, z.reshape(n * d, d).T, lower=False)
    return LeftInverse(frame, matrix, f"sobolev(r={r})")


def reconstruct(left_inverse, w):
    """Apply a left inverse to a stream of quantized (or exact) blocks."""
    return left_inverse.reconstruct(w)


def l_dr_norm(frame, left_inverse, order):
    """Norm of L (difference)^r as a map out of the direct sum.

    Computed on the transpose: r backward applications of the transposed
    difference operator to L^T, then per-block restriction to the subspace
    bases, then one thin SVD. No dense N d x N d matrix is formed.
    """
    n, d = len(frame), frame.ambient_dim
    blocks = left_inverse.matrix.T.reshape(n, d, d)
    for _ in range(int(order)):
        blocks = apply_difference_transpose(frame, blocks)
    restricted = np.concatenate(
        [sub.basis.T @ blocks[i] for i, sub in enumerate(frame.subspaces)], axis=0)
    return linalg.spectral_norm(restricted)


def error_diagnostics(frame, f, left_inverse, stability, y=None, run=None):
    """A-priori error budget, and the exact a-posteriori error when a run is given.

    The budget chains the three factors of the shaped error: the state bound
    (per-block, so a sqrt(N) factor aggregates it), the cofactor norm, and
    the norm of L (difference)^r. When measurements and a run are supplied,
    the report also contains the identity error L (y - q), which equals
    x - reconstruct(q) exactly.
    """
    ldr = l_dr_norm(frame, left_inverse, f.order)
    cof = cofactor_norm(frame, f)
    bound = cof * stability.c_bound * math.sqrt(len(frame)) * ldr
    report = {
        "n_blocks": len(frame),
        "l_dr_norm": ldr,
        "cofactor_norm": cof,
        "state_bound": stability.c_bound,
        "apriori_bound": bound,
    }
    if y is not None and run is not None:
        report["aposteriori_error"] = float(
            np.linalg.norm(left_inverse.matrix @ (y - run.q).stacked))
        report["max_state_norm"] = run.max_state_norm
    return report
