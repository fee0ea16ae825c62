"""Subspaces of R^d, fusion frames, and elements of their direct sums.

A fusion frame is an ordered collection of subspaces W_n with positive
weights c_n such that the weighted projection energies satisfy two-sided
bounds A ||x||^2 <= sum_n c_n^2 ||P_n x||^2 <= B ||x||^2.
"""

import json
import math

import numpy as np

from . import linalg
from .errors import BadParameter, DimensionMismatch, NotAFrame

# entrywise orthonormality tolerance for stored bases and projectors
ORTHO_TOL = 1e-10

# relative threshold below which the lower frame bound counts as zero
FRAME_TOL = 1e-10


class Subspace:
    """An m-dimensional subspace of R^d held as an orthonormal basis.

    The basis columns are validated to be orthonormal on construction and
    the rank-m projector B @ B.T is cached. Instances are treated as
    immutable.
    """

    def __init__(self, basis):
        b = linalg.as_matrix(basis)
        d, m = b.shape
        if not 1 <= m <= d:
            raise BadParameter(f"subspace dimension must satisfy 1 <= {m} <= {d}")
        gram = b.T @ b
        if np.max(np.abs(gram - np.eye(m))) > ORTHO_TOL:
            raise BadParameter("basis columns must be orthonormal; "
                               "use Subspace.from_spanning to orthonormalize")
        self.basis = b
        self.ambient_dim = d
        self.dim = m
        self.projector = b @ b.T

    @classmethod
    def from_spanning(cls, columns):
        """Subspace spanned by (independent, not necessarily orthonormal) columns."""
        return cls(linalg.orthonormalize(columns))

    def project(self, x):
        """Orthogonal projection of x onto the subspace, computed as B (B^T x)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,):
            raise DimensionMismatch(
                f"expected a vector of length {self.ambient_dim}, got shape {x.shape}")
        return self.basis @ (self.basis.T @ x)

    def coords(self, x):
        """Coordinates of (the projection of) x in the stored basis."""
        return self.basis.T @ np.asarray(x, dtype=float)

    def contains(self, x, tol=ORTHO_TOL):
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - self.project(x)) <= tol * max(1.0, np.linalg.norm(x))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


class BlockVector:
    """Element of the direct sum of N subspaces, stored as an (N, d) array.

    Block n is a vector of R^d constrained (by whoever constructs it) to lie
    in the n-th subspace. The direct-sum norm is the root sum of squared
    block norms; the sup norm is the largest block norm.
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        arr = np.array(blocks, dtype=float)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected an (N, d) block array, got shape {arr.shape}")
        self.blocks = arr

    @classmethod
    def zeros(cls, n_blocks, ambient_dim):
        return cls(np.zeros((n_blocks, ambient_dim)))

    @classmethod
    def from_stacked(cls, vec, ambient_dim):
        vec = np.asarray(vec, dtype=float)
        if vec.ndim != 1 or vec.size % ambient_dim != 0:
            raise DimensionMismatch(f"cannot reshape length-{vec.size} data into d={ambient_dim} blocks")
        return cls(vec.reshape(-1, ambient_dim))

    @property
    def n_blocks(self):
        return self.blocks.shape[0]

    @property
    def ambient_dim(self):
        return self.blocks.shape[1]

    @property
    def stacked(self):
        """The blocks concatenated into a single vector of length N*d."""
        return self.blocks.reshape(-1)

    def norm(self):
        return float(np.linalg.norm(self.blocks))

    def norm_inf(self):
        return float(np.max(np.linalg.norm(self.blocks, axis=1)))

    def copy(self):
        return BlockVector(self.blocks.copy())

    def __len__(self):
        return self.blocks.shape[0]

    def __getitem__(self, n):
        return self.blocks[n]

    def __add__(self, other):
        return BlockVector(self.blocks + other.blocks)

    def __sub__(self, other):
        return BlockVector(self.blocks - other.blocks)

    def __rmul__(self, scalar):
        return BlockVector(float(scalar) * self.blocks)

    def __repr__(self):
        return f"BlockVector(n_blocks={self.n_blocks}, ambient_dim={self.ambient_dim})"


class FusionFrame:
    """Ordered collection of subspaces with positive weights (default all 1)."""

    def __init__(self, subspaces, weights=None):
        subspaces = list(subspaces)
        if not subspaces:
            raise BadParameter("a fusion frame needs at least one subspace")
        d = subspaces[0].ambient_dim
        for w in subspaces:
            if w.ambient_dim != d:
                raise DimensionMismatch("all subspaces must share the ambient dimension")
        if weights is None:
            weights = np.ones(len(subspaces))
        else:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (len(subspaces),):
                raise DimensionMismatch("need one weight per subspace")
            if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
                raise BadParameter("weights must be positive finite scalars")
        self.subspaces = subspaces
        self.weights = weights
        self._projectors = None
        self._frame_op = None

    @property
    def ambient_dim(self):
        return self.subspaces[0].ambient_dim

    @property
    def dims(self):
        return [w.dim for w in self.subspaces]

    @property
    def max_dim(self):
        return max(self.dims)

    @property
    def is_unweighted(self):
        return bool(np.all(self.weights == 1.0))

    def __len__(self):
        return len(self.subspaces)

    @property
    def projector_array(self):
        """Stacked projectors as an (N, d, d) array (cached)."""
        if self._projectors is None:
            self._projectors = np.stack([w.projector for w in self.subspaces])
        return self._projectors

    def analysis(self, x):
        """Weighted projections {c_n P_n x} as a BlockVector."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,):
            raise DimensionMismatch(
                f"expected a vector of length {self.ambient_dim}, got shape {x.shape}")
        blocks = self.projector_array @ x
        return BlockVector(self.weights[:, None] * blocks)

    def synthesis(self, w):
        """Weighted block sum: the adjoint of analysis."""
        if w.n_blocks != len(self) or w.ambient_dim != self.ambient_dim:
            raise DimensionMismatch(
                f"expected {len(self)} blocks of dimension {self.ambient_dim}")
        return np.asarray((self.weights[:, None] * w.blocks).sum(axis=0))

    def frame_operator(self):
        """The d x d operator sum_n c_n^2 P_n (symmetric PSD; cached)."""
        if self._frame_op is None:
            c2 = self.weights ** 2
            self._frame_op = np.einsum("n,nij->ij", c2, self.projector_array)
        return self._frame_op

    def frame_bounds(self):
        """(A, B): smallest and largest eigenvalue of the frame operator."""
        eigvals = np.linalg.eigvalsh(self.frame_operator())
        return float(eigvals[0]), float(eigvals[-1])

    def is_frame(self, tol=FRAME_TOL):
        a, b = self.frame_bounds()
        return a > tol * max(b, 1.0)

    def is_tight(self, rtol=1e-9):
        a, b = self.frame_bounds()
        return b - a <= rtol * max(b, 1.0)

    def analysis_matrix(self):
        """The analysis operator as an (N*d, d) stacked matrix of c_n P_n blocks."""
        return (self.weights[:, None, None] * self.projector_array).reshape(-1, self.ambient_dim)

    def membership_residual(self, w):
        """Largest relative distance of a block from its subspace."""
        if w.n_blocks != len(self):
            raise DimensionMismatch("block count does not match the frame")
        projected = np.matmul(self.projector_array, w.blocks[:, :, None])[:, :, 0]
        defect = np.linalg.norm(w.blocks - projected, axis=1)
        scale = np.maximum(1.0, np.linalg.norm(w.blocks, axis=1))
        return float(np.max(defect / scale))

    def prefix(self, n):
        """The frame consisting of the first n subspaces."""
        if not 1 <= n <= len(self):
            raise BadParameter(f"prefix length {n} out of range 1..{len(self)}")
        return FusionFrame(self.subspaces[:n], self.weights[:n])

    def to_dict(self):
        return {
            "ambient_dim": self.ambient_dim,
            "weights": self.weights.tolist(),
            "bases": [[col.tolist() for col in w.basis.T] for w in self.subspaces],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            d = int(data["ambient_dim"])
            weights = data["weights"]
            bases = data["bases"]
        except (KeyError, TypeError) as exc:
            raise BadParameter(f"malformed frame data: {exc}") from exc
        subspaces = []
        for cols in bases:
            basis = np.array(cols, dtype=float).T
            if basis.shape[0] != d:
                raise DimensionMismatch("basis vectors must have the ambient dimension")
            subspaces.append(Subspace(basis))
        return cls(subspaces, weights)

    def save_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def __repr__(self):
        return (f"FusionFrame(N={len(self)}, ambient_dim={self.ambient_dim}, "
                f"dims={sorted(set(self.dims))})")


def example_frame_r3(n_subspaces):
    """The deterministic family of N planes in R^3 with equidistributed normals.

    Subspace n is the plane orthogonal to the unit vector
    (1/sqrt(3), sqrt(2/3) cos(2 pi n / N), sqrt(2/3) sin(2 pi n / N)),
    with the orthonormal basis
        e_1 = (0, sin t, -cos t),
        e_2 = (-sqrt(2), cos t, sin t) / sqrt(3),   t = 2 pi n / N.
    The resulting unweighted frame is tight with bounds A = B = 2N/3.
    """
    n_subspaces = int(n_subspaces)
    if n_subspaces < 3:
        raise BadParameter("the R^3 plane family needs at least 3 subspaces")
    subspaces = []
    for n in range(1, n_subspaces + 1):
        t = 2.0 * math.pi * n / n_subspaces
        e1 = np.array([0.0, math.sin(t), -math.cos(t)])
        e2 = np.array([-math.sqrt(2.0), math.cos(t), math.sin(t)]) / math.sqrt(3.0)
        subspaces.append(Subspace(np.column_stack([e1, e2])))
    return FusionFrame(subspaces)


def example_normals_r3(n_subspaces):
    """Unit normals of the example_frame_r3 planes, as an (N, 3) array."""
    n = np.arange(1, int(n_subspaces) + 1)
    t = 2.0 * np.pi * n / int(n_subspaces)
    return np.column_stack([
        np.full(len(n), 1.0 / math.sqrt(3.0)),
        math.sqrt(2.0 / 3.0) * np.cos(t),
        math.sqrt(2.0 / 3.0) * np.sin(t),
    ])


def random_frame(ambient_dim, dims, seed):
    """Frame of pseudo-random subspaces with the given dimensions.

    Each subspace is the span of i.i.d. Gaussian columns, orthonormalized.
    Deterministic for a fixed seed. The frame property is not enforced here;
    check frame_bounds() if a positive lower bound is required.
    """
    d = int(ambient_dim)
    if d < 1:
        raise BadParameter("ambient dimension must be at least 1")
    dims = [int(m) for m in dims]
    if not dims:
        raise BadParameter("need at least one subspace dimension")
    if any(m < 1 or m > d for m in dims):
        raise BadParameter(f"subspace dimensions must lie in 1..{d}")
    rng = np.random.default_rng(seed)
    subspaces = [Subspace.from_spanning(rng.standard_normal((d, m))) for m in dims]
    return FusionFrame(subspaces)


def require_frame(frame, tol=FRAME_TOL):
    """Raise NotAFrame unless the lower frame bound is positive to tolerance."""
    a, b = frame.frame_bounds()
    if a <= tol * max(b, 1.0):
        raise NotAFrame(f"lower frame bound {a:.3e} is not positive to tolerance")
    return a, b
