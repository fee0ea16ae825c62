"""Self-contained verification suite bundling the library's checkable identities.

Every check is a measured residual against a fixed threshold; the suite
reports pass/fail per check plus the worst residual, so a regression shows
up as a number, not just a boolean. Exact-arithmetic checks (the filter's
binomial interpolation identity) use rational arithmetic and a zero
threshold.
"""

import math
from fractions import Fraction

import numpy as np

from . import filters as _filters
from . import linalg
from .alphabets import simplex_alphabet
from .block_ops import (BasisEmbedding, cofactor_norm, difference_inv_pow, difference_op,
                        factorization_residual, feedback_op, op_norm, shaping_cofactor,
                        shaping_cofactor_banded)
from .duals import canonical_left_inverse, sobolev_left_inverse
from .frames import example_frame_r3, random_frame
from .sigma_delta import ffsd_run, recursion_residual


def _check(name, residual, threshold, extra=None):
    entry = {
        "name": name,
        "residual": residual,
        "threshold": threshold,
        "passed": bool(residual <= threshold),
    }
    if extra:
        entry.update(extra)
    return entry


def _interpolation_defect(f, n, h1_perturbation=Fraction(0)):
    """Exact defect of the binomial interpolation identity at lag n."""
    r = f.order
    total = Fraction(math.comb(r + n - 1, r - 1))
    coeffs = list(f.coeffs_exact)
    coeffs[0] += Fraction(h1_perturbation)
    for n_j, d_j in zip(f.supports, coeffs):
        if n_j <= n:
            total -= Fraction(math.comb(r + n - 1 - n_j, r - 1)) * d_j
    return total


def check_interpolation_identity(span=400, h1_perturbation=Fraction(0)):
    """The filter reproduces binomial weights exactly at and past the bandwidth."""
    bad = 0
    for r in (2, 3):
        for sigma in (10, 50):
            f = _filters.build_filter(r, sigma)
            for n in range(f.bandwidth, f.bandwidth + span + 1):
                if _interpolation_defect(f, n, h1_perturbation) != 0:
                    bad += 1
    return _check("interpolation_identity", bad, 0,
                  {"detail": "nonzero exact defects over r in {2,3}, sigma in {10,50}"})


def check_coefficient_sum():
    """The filter taps sum to exactly 1 for every tested order."""
    bad = 0
    for r in (1, 2, 3, 4):
        for sigma in (10, 50):
            f = _filters.build_filter(r, sigma)
            if sum(f.coeffs_exact, Fraction(0)) != 1:
                bad += 1
    return _check("coefficient_sum", bad, 0)


def check_stability_constants():
    """Reference values of the admissible-gain interval at d*=2, delta=0.1."""
    p = _filters.stability_params(2, 0.1, 1.101)
    worst = max(abs(p.alpha1 - math.sqrt(Fraction(91, 75))),
                abs(p.alpha2 - (0.4 + math.sqrt(4.16)) / 2),
                abs(p.c_bound - 440400 / 212201))
    sigma_ok = 0 if _filters.min_sigma_for_alpha(1.101) == 50 else 1
    return _check("stability_constants", worst + sigma_ok, 1e-12)


def check_inverse_oracle(seed=11, cases=6):
    """Closed-form inverse powers match brute-force inversion in coordinates."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(5, 41))
        dims = [int(rng.integers(1, d + 1)) for _ in range(n)]
        frame = random_frame(d, dims, int(rng.integers(0, 2 ** 31)))
        emb = BasisEmbedding(frame)
        coord_d = emb.restrict(difference_op(frame).matrix)
        inv = np.linalg.inv(coord_d)
        for r in (1, 2, 3):
            closed = emb.restrict(difference_inv_pow(frame, r).matrix)
            brute = np.linalg.matrix_power(inv, r)
            worst = max(worst, np.linalg.norm(closed - brute) / np.linalg.norm(brute))
    return _check("inverse_oracle", worst, 1e-9)


def check_factorization():
    """(I - H) recovers as the r-th difference power times the cofactor."""
    worst = max(
        factorization_residual(example_frame_r3(120), _filters.build_filter(2, 50)),
        factorization_residual(random_frame(4, [2, 3, 1, 4, 2, 3] * 10, seed=3),
                               _filters.build_filter(3, 10)),
    )
    return _check("factorization", worst, 1e-9)


def check_cofactor_structure():
    """Bandedness, entrywise bound, norm bound, and banded-form agreement."""
    worst_band = 0.0
    worst_entry = -np.inf
    worst_norm = -np.inf
    worst_agree = 0.0
    for frame, f in ((example_frame_r3(120), _filters.build_filter(2, 50)),
                     (random_frame(3, [2, 1, 2] * 20, seed=5), _filters.build_filter(3, 10))):
        g = shaping_cofactor(frame, f)
        banded = shaping_cofactor_banded(frame, f)
        worst_agree = max(worst_agree, np.max(np.abs(g.matrix - banded.matrix)))
        eps = f.h_l1 - 1.0
        entry_cap = (2.0 + eps) * f.coeff_growth
        for i in range(len(frame)):
            for j in range(i + 1):
                norm = linalg.spectral_norm(g.block(i, j))
                if i - j >= f.bandwidth:
                    worst_band = max(worst_band, norm)
                else:
                    worst_entry = max(worst_entry, norm - entry_cap)
        norm_cap = (2.0 + eps) * f.coeff_growth * f.bandwidth
        dense_norm = op_norm(g)
        sparse_norm = cofactor_norm(frame, f)
        worst_norm = max(worst_norm, dense_norm - norm_cap)
        worst_agree = max(worst_agree, abs(dense_norm - sparse_norm) / dense_norm)
    residual = max(worst_band, worst_entry, worst_norm, worst_agree)
    return _check("cofactor_structure", residual, 1e-9)


def check_alphabets(seed=17):
    """Gram structure and quantizer correlation floor for several dimensions."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in (1, 2, 3, 5):
        d = m + 2
        sub = random_frame(d, [m], seed=m).subspaces[0]
        alpha = simplex_alphabet(sub)
        expected = -np.ones((m + 1, m + 1)) / m + np.eye(m + 1) * (1.0 + 1.0 / m)
        worst = max(worst, float(np.max(np.abs(alpha.gram() - expected))))
        worst = max(worst, float(np.linalg.norm(alpha.elements.sum(axis=0))))
        floor = 1.0 / m - 1e-12
        for _ in range(200):
            w = sub.project(rng.standard_normal(d))
            w /= np.linalg.norm(w)
            element, _ = alpha.quantize(w)
            worst = max(worst, floor - float(element @ w))
    return _check("alphabets", worst, 1e-10)


def check_left_inverses():
    """Composition with analysis is the identity; tight-frame shortcut matches."""
    composition = 0.0
    for frame in (example_frame_r3(50), random_frame(4, [2, 3, 1, 4] * 5, seed=7)):
        composition = max(composition, canonical_left_inverse(frame).composition_defect())
        for r in (1, 2, 3):
            composition = max(composition, sobolev_left_inverse(frame, r).composition_defect())
    frame = example_frame_r3(50)
    shortcut = (3.0 / (2 * 50)) * frame.analysis_matrix().T
    shortcut_defect = float(np.max(np.abs(canonical_left_inverse(frame).matrix - shortcut)))
    return [_check("left_inverse_composition", composition, 1e-8),
            _check("tight_frame_shortcut", shortcut_defect, 1e-10)]


def check_error_identity():
    """x - reconstruction equals L(y - q), and matches the operator chain."""
    frame = example_frame_r3(120)
    f = _filters.build_filter(2, 50)
    x = np.array([1 / 25, math.pi / 57, 1 / (2 * math.sqrt(57))])
    y = frame.analysis(x)
    run = ffsd_run(frame, f, y)
    recursion = recursion_residual(frame, f, y, run)

    identity = 0.0
    chain = 0.0
    h = feedback_op(frame, f)
    eye = np.eye(h.matrix.shape[0])
    dr = np.linalg.matrix_power(difference_op(frame).matrix, f.order)
    g = shaping_cofactor(frame, f)
    for make in (canonical_left_inverse, lambda fr: sobolev_left_inverse(fr, f.order)):
        left = make(frame)
        direct = x - left.reconstruct(run.q)
        via_residual = left.matrix @ (y - run.q).stacked
        identity = max(identity, float(np.linalg.norm(direct - via_residual)))
        via_h = left.matrix @ ((eye - h.matrix) @ run.v.stacked)
        chain = max(chain, float(np.linalg.norm(direct - via_h)))
        via_full = left.matrix @ (dr @ (g.matrix @ run.v.stacked))
        chain = max(chain, float(np.linalg.norm(direct - via_full)))
    return [_check("recursion_residual", recursion, 1e-10),
            _check("error_identity", identity, 1e-10),
            _check("error_operator_chain", chain, 1e-9)]


def check_pipeline_sanity():
    """Unquantized measurements reconstruct the signal through every inverse."""
    x = np.array([1 / 25, math.pi / 57, 1 / (2 * math.sqrt(57))])
    worst = 0.0
    for n in (30, 120, 300):
        frame = example_frame_r3(n)
        y = frame.analysis(x)
        for left in (canonical_left_inverse(frame), sobolev_left_inverse(frame, 2)):
            worst = max(worst, float(np.linalg.norm(x - left.reconstruct(y))))
    return _check("pipeline_sanity", worst, 1e-8)


def verify_suite(h1_perturbation=Fraction(0)):
    """Run every check; the report is machine-readable and order-stable.

    h1_perturbation shifts the first filter tap in the exact identity check
    only; any nonzero value must fail it (negative control for the suite
    itself).
    """
    checks = [
        check_interpolation_identity(h1_perturbation=h1_perturbation),
        check_coefficient_sum(),
        check_stability_constants(),
        check_inverse_oracle(),
        check_factorization(),
        check_cofactor_structure(),
        check_alphabets(),
        *check_left_inverses(),
        *check_error_identity(),
        check_pipeline_sanity(),
    ]
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}
