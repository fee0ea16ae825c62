from math import comb

import numpy as np
import pytest

from fusionsd.block_ops import (BasisEmbedding, apply_difference,
                                apply_difference_transpose,
                                cofactor_coordinate_sparse, cofactor_norm,
                                difference_inv_pow, difference_op,
                                factorization_residual, feedback_op, op_norm,
                                shaping_cofactor, shaping_cofactor_banded,
                                solve_difference, solve_difference_transpose)
from fusionsd.filters import build_filter, cofactor_coefficient
from fusionsd.frames import example_frame_r3, random_frame

rng = np.random.default_rng(43)


def chain_product(projs, i, j):
    """P_i P_{i-1} ... P_{j+1} computed the slow explicit way."""
    out = np.eye(projs.shape[1])
    for k in range(j + 1, i + 1):
        out = projs[k] @ out
    return out


def test_difference_op_structure():
    fr = example_frame_r3(5)
    d = difference_op(fr)
    projs = fr.projector_array
    eye = np.eye(3)
    for i in range(5):
        for j in range(5):
            blk = d.block(i, j)
            if i == j:
                np.testing.assert_array_equal(blk, eye)
            elif i == j + 1:
                np.testing.assert_allclose(blk, -projs[i], atol=1e-15)
            else:
                assert np.abs(blk).max() == 0.0


def test_difference_apply_matches_matrix():
    fr = random_frame(3, [2, 2, 1, 2], seed=8)
    d = difference_op(fr)
    w = rng.standard_normal((4, 3))
    via_matrix = (d.matrix @ w.reshape(-1)).reshape(4, 3)
    np.testing.assert_allclose(apply_difference(fr, w), via_matrix,
                               atol=1e-13)
    via_t = (d.matrix.T @ w.reshape(-1)).reshape(4, 3)
    np.testing.assert_allclose(apply_difference_transpose(fr, w), via_t,
                               atol=1e-13)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_closed_form_inverse_is_exact_inverse(order):
    fr = example_frame_r3(8)
    d = difference_op(fr)
    inv = difference_inv_pow(fr, order)
    dn = np.linalg.matrix_power(d.matrix, order)
    np.testing.assert_allclose(dn @ inv.matrix, np.eye(24), atol=1e-11)


def test_closed_form_inverse_blocks():
    # block (i, j) must be binom(r + i - j - 1, r - 1) P_i ... P_{j+1}
    fr = random_frame(3, [2, 1, 2, 2, 2], seed=9)
    projs = fr.projector_array
    for order in (1, 2, 3):
        inv = difference_inv_pow(fr, order)
        for i in range(5):
            for j in range(i + 1):
                w = comb(order + i - j - 1, order - 1)
                expected = w * chain_product(projs, i, j)
                np.testing.assert_allclose(inv.block(i, j), expected,
                                           atol=1e-12)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_closed_form_matches_numeric_coordinate_inverse(order):
    # oracle: invert the coordinate restriction of D numerically
    fr = random_frame(4, [2, 3, 2, 1, 2, 3], seed=10)
    emb = BasisEmbedding(fr)
    d_coord = emb.restrict(difference_op(fr).matrix)
    inv_coord = np.linalg.matrix_power(np.linalg.inv(d_coord), order)
    closed = emb.restrict(difference_inv_pow(fr, order).matrix)
    err = np.linalg.norm(closed - inv_coord) / np.linalg.norm(inv_coord)
    assert err <= 1e-9


def test_solve_difference_roundtrip():
    fr = random_frame(3, [2, 2, 2, 1], seed=12)
    w = rng.standard_normal((4, 3))
    np.testing.assert_allclose(solve_difference(fr, apply_difference(fr, w)),
                               w, atol=1e-12)
    np.testing.assert_allclose(
        solve_difference_transpose(fr, apply_difference_transpose(fr, w)),
        w, atol=1e-12)


def test_feedback_op_blocks():
    fr = example_frame_r3(9)
    f = build_filter(2, 3)          # taps at lags 1 and 4
    h = feedback_op(fr, f)
    projs = fr.projector_array
    taps = dict(zip(f.supports, f.coeffs))
    for i in range(9):
        for j in range(9):
            lag = i - j
            blk = h.block(i, j)
            if lag in taps:
                expected = taps[lag] * chain_product(projs, i, j)
                np.testing.assert_allclose(blk, expected, atol=1e-13)
            else:
                assert np.abs(blk).max() == 0.0


@pytest.mark.parametrize("setup", [
    ("r3", 120, 2, 50), ("r3", 300, 2, 50), ("random", 60, 3, 10)])
def test_factorization(setup):
    kind, n, order, sigma = setup
    if kind == "r3":
        fr = example_frame_r3(n)
    else:
        fr = random_frame(4, [2, 3, 1] * (n // 3), seed=14)
    f = build_filter(order, sigma)
    assert factorization_residual(fr, f) <= 1e-9


def test_cofactor_banded_equals_product_form():
    fr = example_frame_r3(40)
    f = build_filter(2, 10)
    a = shaping_cofactor(fr, f).matrix
    b = shaping_cofactor_banded(fr, f).matrix
    assert np.abs(a - b).max() < 1e-10


def test_cofactor_bandedness():
    fr = example_frame_r3(30)
    f = build_filter(2, 10)       # bandwidth 10
    g = shaping_cofactor_banded(fr, f)
    for i in range(30):
        for j in range(30):
            blk = g.block(i, j)
            off = i - j
            if off < 0 or off >= f.bandwidth:
                assert np.abs(blk).max() <= 1e-9
            else:
                cap = (2.0 + (f.h_l1 - 1.0)) * f.coeff_growth
                assert np.linalg.norm(blk, 2) <= cap + 1e-12


def test_cofactor_diagonal_blocks_are_identity():
    # both (I - H) and D^r have identity diagonals, so the cofactor does too
    fr = example_frame_r3(12)
    f = build_filter(2, 10)
    g = shaping_cofactor_banded(fr, f)
    for i in range(12):
        np.testing.assert_allclose(g.block(i, i), np.eye(3), atol=1e-12)


def test_cofactor_entry_weights():
    # coordinate entries follow the scalar cofactor coefficients when all
    # the projectors commute; the frame of identical copies of one plane
    # makes every chain collapse to the plane projector
    fr = example_frame_r3(3)
    from fusionsd.frames import FusionFrame
    w = fr.subspaces[0]
    same = FusionFrame([w] * 14)
    f = build_filter(2, 4)
    g = shaping_cofactor_banded(same, f)
    p = w.projector
    for off in range(1, 14):
        c = float(cofactor_coefficient(f, off))
        np.testing.assert_allclose(g.block(13, 13 - off), c * p, atol=1e-12)


def test_sparse_cofactor_matches_dense_restriction():
    fr = example_frame_r3(25)
    f = build_filter(2, 10)
    emb = BasisEmbedding(fr)
    dense = emb.restrict(shaping_cofactor_banded(fr, f).matrix)
    sparse = cofactor_coordinate_sparse(fr, f)
    assert np.abs(sparse.toarray() - dense).max() < 1e-11


def test_cofactor_norm_paths_agree():
    fr = example_frame_r3(35)
    f = build_filter(2, 10)
    emb = BasisEmbedding(fr)
    dense = emb.restrict(shaping_cofactor_banded(fr, f).matrix)
    expected = np.linalg.norm(dense, 2)
    assert abs(cofactor_norm(fr, f) - expected) < 1e-9 * expected


def test_cofactor_norm_cap():
    for n, order, sigma in ((60, 2, 10), (90, 2, 50), (80, 3, 10)):
        fr = example_frame_r3(n)
        f = build_filter(order, sigma)
        eps = f.h_l1 - 1.0
        assert cofactor_norm(fr, f) <= (2.0 + eps) * f.coeff_growth * f.bandwidth


def test_op_norm_of_difference():
    # ||D|| <= 2 always; equals 2 when consecutive subspaces coincide
    fr = example_frame_r3(20)
    assert op_norm(difference_op(fr)) <= 2.0 + 1e-12
