"""Simplex quantization alphabets and the nearest-point vector quantizer.

An m-dimensional subspace gets an alphabet of m+1 unit vectors that sum to
zero and have pairwise inner products -1/m (the vertices of a regular
simplex). Every direction of the subspace is within angle arccos(1/m) of
some element, which is what drives the quantizer's correlation floor
<Q(w), w/||w||> >= 1/m. Encoding one of m+1 elements costs log2(m+1) bits.
"""

import math

import numpy as np

from . import linalg
from .errors import DimensionMismatch

UNIT_TOL = 1e-12
GRAM_TOL = 1e-10


class Alphabet:
    """Quantization alphabet of a subspace: unit vectors plus the quantizer."""

    def __init__(self, subspace, elements):
        elements = np.array(elements, dtype=float)
        if elements.ndim != 2 or elements.shape[1] != subspace.ambient_dim:
            raise DimensionMismatch("elements must be rows of ambient dimension "
                                    f"{subspace.ambient_dim}")
        self.subspace = subspace
        self.elements = elements
        m = subspace.dim
        self.covering_angle = math.acos(1.0 / m) if m > 0 else 0.0

    @property
    def n_elements(self):
        return self.elements.shape[0]

    @property
    def bits(self):
        """Bits needed to index one element."""
        return math.log2(self.n_elements)

    def quantize(self, w):
        """Nearest alphabet element to w, as (element, index).

        For a unit-norm alphabet, minimizing ||w - u_k|| is the same as
        maximizing <w, u_k>, so only the inner products are compared. Ties
        resolve to the smallest index; w = 0 therefore yields index 0. The
        input is projected onto the subspace first, which leaves the scores
        unchanged for w already in the subspace but guards against drift
        accumulated by upstream projector products.
        """
        w = np.asarray(w, dtype=float)
        if w.shape != (self.subspace.ambient_dim,):
            raise DimensionMismatch(
                f"expected a vector of length {self.subspace.ambient_dim}, got shape {w.shape}")
        scores = self.elements @ self.subspace.project(w)
        index = int(np.argmax(scores))
        return self.elements[index], index

    def gram(self):
        return self.elements @ self.elements.T

    def __repr__(self):
        return f"Alphabet(n_elements={self.n_elements}, subspace_dim={self.subspace.dim})"


def simplex_alphabet(subspace):
    """Regular simplex alphabet of a subspace.

    The m+1 vertices of the centered standard simplex of R^{m+1},
    v_j = e_j - (1/(m+1)) * ones, are expressed in an orthonormal basis of
    their span (the sum-zero hyperplane) and carried into the subspace
    through its stored basis. The first element aligns with the image of
    the first basis vector under this construction; no other orientation is
    promised.
    """
    m = subspace.dim
    vertices = np.eye(m + 1) - 1.0 / (m + 1)
    # any m of the m+1 vertices span the sum-zero hyperplane
    hyperplane_basis = linalg.orthonormalize(vertices[:, :m])
    unit_vertices = vertices / np.linalg.norm(vertices, axis=0)
    coords = hyperplane_basis.T @ unit_vertices
    return Alphabet(subspace, (subspace.basis @ coords).T)


def frame_alphabets(frame):
    """One simplex alphabet per subspace of the frame."""
    return [simplex_alphabet(w) for w in frame.subspaces]
