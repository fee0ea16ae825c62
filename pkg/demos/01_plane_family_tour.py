#!/usr/bin/env python3
# Tour of the deterministic plane family in R^3 and its simplex alphabets.

import numpy as np

from fusionsd import (canonical_left_inverse, example_frame_r3, frame_alphabets,
                      simplex_alphabet)

N = 12
fr = example_frame_r3(N)
print(fr)
print("subspace dims:", [w.dim for w in fr.subspaces])

# the family is tight: the frame operator is (2N/3) I
S = fr.frame_operator()
lo, hi = fr.frame_bounds()
print("frame bounds: A=%.12f  B=%.12f  (2N/3 = %.12f)" % (lo, hi, 2 * N / 3))
print("tight:", fr.is_tight())

# canonical reconstruction collapses to a rescaled adjoint for tight frames
x = np.array([0.03, -0.05, 0.04])
y = fr.analysis(x)
xhat = canonical_left_inverse(fr).reconstruct(y)
print("unquantized round trip error: %.3e" % np.linalg.norm(x - xhat))

# each plane carries 3 unit vectors summing to zero with pairwise dot -1/2
a = simplex_alphabet(fr.subspaces[0])
print("\nalphabet on W_1: %d elements, %.4f bits" % (a.n_elements, a.bits))
print("element Gram matrix:")
print(np.round(a.gram(), 12))
print("element sum norm: %.3e" % np.linalg.norm(a.elements.sum(axis=0)))
print("covering angle: %.6f rad (acos(1/2) = %.6f)" %
      (a.covering_angle, np.arccos(0.5)))

# quantizing any unit vector of the plane keeps correlation >= 1/2
rng = np.random.default_rng(0)
worst = 1.0
for _ in range(2000):
    w = fr.subspaces[0].project(rng.standard_normal(3))
    w /= np.linalg.norm(w)
    element, idx = a.quantize(w)
    worst = min(worst, float(element @ w))
print("worst correlation over 2000 random unit vectors: %.6f (floor 0.5)" % worst)

# one alphabet per subspace, shared pipeline entry point
als = frame_alphabets(fr)
print("\nalphabet sizes along the frame:", [al.n_elements for al in als[:6]], "...")
