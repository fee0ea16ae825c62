"""Sparse feedback filters for the high-order quantization loop.

A filter of order r is a sequence h supported on r taps
    n_j = sigma * (j - 1)^2 + 1,   j = 1..r,
with coefficients d_j = prod_{i != j} n_i / (n_i - n_j). The coefficients
are the Lagrange weights that make the filter reproduce binomial weights at
lag K = n_r - r + 1 and beyond, which is exactly what truncates the shaping
cofactor to a banded operator. Their l1 norm is controlled by
cosh(pi / sqrt(sigma)), so sigma trades tap span for feedback gain.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadData, BadParameter, Infeasible


@dataclass(frozen=True)
class FilterSpec:
    """Order-r sparse feedback filter with exact rational coefficients."""

    order: int
    sigma: int
    supports: tuple          # tap positions n_j, strictly increasing, n_1 = 1
    coeffs_exact: tuple      # tap values d_j as Fractions
    coeffs: tuple            # the same values as floats

    @property
    def length(self):
        """Index of the last tap: the state history depth the loop needs."""
        return self.supports[-1]

    @property
    def bandwidth(self):
        """Offset K = n_r - r + 1 past which the shaping cofactor vanishes."""
        return self.length - self.order + 1

    @property
    def coeff_growth(self):
        """binom(r + K - 2, r - 1), the largest binomial weight inside the band."""
        return math.comb(self.order + self.bandwidth - 2, self.order - 1)

    @property
    def h_l1(self):
        return float(sum(abs(c) for c in self.coeffs_exact))

    def taps(self):
        """Pairs (n_j, d_j) with float coefficients."""
        return list(zip(self.supports, self.coeffs))

    def dense(self, length):
        """The filter as a dense array h[0..length-1] with h[n_j - 1] = d_j."""
        h = np.zeros(int(length))
        for n_j, d_j in zip(self.supports, self.coeffs):
            if n_j <= length:
                h[n_j - 1] = d_j
        return h

    def to_dict(self):
        return {
            "r": self.order,
            "sigma": self.sigma,
            "supports": list(self.supports),
            "coeffs": [float(c) for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            rebuilt = build_filter(int(data["r"]), int(data["sigma"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise BadData(f"malformed filter data: {exc}") from exc
        if list(rebuilt.supports) != [int(n) for n in data.get("supports", rebuilt.supports)]:
            raise BadData("stored supports disagree with the (r, sigma) construction")
        stored = [float(c) for c in data.get("coeffs", rebuilt.coeffs)]
        if any(abs(a - b) > 1e-12 * max(1.0, abs(b)) for a, b in zip(stored, rebuilt.coeffs)):
            raise BadData("stored coefficients disagree with the (r, sigma) construction")
        return rebuilt

    def save_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def build_filter(order, sigma):
    """Construct the order-r filter for a given sigma.

    order = 1 degenerates to the single tap h = delta_1 with coefficient 1
    (an empty Lagrange product), which turns the loop into plain first-order
    error feedback.
    """
    r = int(order)
    sigma = int(sigma)
    if r < 1:
        raise BadParameter("filter order must be at least 1")
    if sigma < 1:
        raise BadParameter("sigma must be a positive integer")
    supports = tuple(sigma * (j - 1) ** 2 + 1 for j in range(1, r + 1))
    coeffs_exact = []
    for j in range(r):
        c = Fraction(1)
        for i in range(r):
            if i != j:
                c *= Fraction(supports[i], supports[i] - supports[j])
        coeffs_exact.append(c)
    return FilterSpec(order=r, sigma=sigma, supports=supports,
                      coeffs_exact=tuple(coeffs_exact),
                      coeffs=tuple(float(c) for c in coeffs_exact))


def cofactor_coefficient(f, offset):
    """Exact scalar coefficient of the shaping cofactor at a block offset.

    For offset k >= 1 this is
        binom(r+k-1, r-1) - sum_{l=1}^{k} binom(r+k-l-1, r-1) h_l,
    computed in exact rational arithmetic. The filter coefficients are
    Lagrange weights interpolating the binomial sequence, so the value is
    identically zero for every offset >= bandwidth. offset 0 returns 1 (the
    identity diagonal).
    """
    k = int(offset)
    if k < 0:
        return Fraction(0)
    if k == 0:
        return Fraction(1)
    r = f.order
    total = Fraction(math.comb(r + k - 1, r - 1))
    for n_j, d_j in zip(f.supports, f.coeffs_exact):
        if n_j <= k:
            total -= Fraction(math.comb(r + k - n_j - 1, r - 1)) * d_j
    return total


def cofactor_coefficients(f, max_offset):
    """Float array of cofactor coefficients for offsets 0..max_offset."""
    return np.array([float(cofactor_coefficient(f, k)) for k in range(int(max_offset) + 1)])


def l1_growth_bound(sigma):
    """cosh(pi / sqrt(sigma)): the uniform-in-r bound on the filter's l1 norm."""
    return math.cosh(math.pi / math.sqrt(float(sigma)))


def min_sigma_for_alpha(alpha):
    """Smallest integer sigma with cosh(pi / sqrt(sigma)) <= alpha."""
    alpha = float(alpha)
    if alpha <= 1.0:
        raise BadParameter("alpha must exceed 1")
    sigma = max(1, math.ceil((math.pi / math.acosh(alpha)) ** 2))
    # guard the ceil against floating-point boundary error in either direction
    while sigma > 1 and l1_growth_bound(sigma - 1) <= alpha:
        sigma -= 1
    while l1_growth_bound(sigma) > alpha:
        sigma += 1
    return sigma


@dataclass(frozen=True)
class StabilityParams:
    """Admissible loop-gain parameters and the resulting state-norm bound."""

    d_star: int
    delta: float
    alpha: float
    alpha1: float
    alpha2: float
    c_bound: float


def stability_params(d_star, delta, alpha=None):
    """State-norm bound for inputs of norm at most delta.

    Requires 0 < delta < 1/d_star, where d_star is the largest subspace
    dimension. The admissible gain interval is 1 < alpha <= min(alpha1,
    alpha2) with
        alpha1 = sqrt((1 - 2 delta / d_star + delta^2) / (1 - 1/d_star^2))
        alpha2 = ((1/d_star - delta) + sqrt((1/d_star - delta)^2 + 4)) / 2,
    alpha1 being +inf when d_star = 1. Any such alpha certifies the state
    bound C = (1/d_star - delta) * alpha / (alpha^2 - 1) >= 1, provided the
    per-step feedback gain stays below alpha. alpha defaults to
    min(alpha1, alpha2) - 1e-3.
    """
    d_star = int(d_star)
    if d_star < 1:
        raise BadParameter("d_star must be a positive integer")
    delta = float(delta)
    if not 0.0 < delta < 1.0 / d_star:
        raise BadParameter(f"delta must lie in (0, 1/{d_star})")
    gap = 1.0 / d_star - delta
    if d_star == 1:
        alpha1 = math.inf
    else:
        alpha1 = math.sqrt((1.0 - 2.0 * delta / d_star + delta ** 2)
                           / (1.0 - 1.0 / d_star ** 2))
    alpha2 = (gap + math.sqrt(gap ** 2 + 4.0)) / 2.0
    ceiling = min(alpha1, alpha2)
    if alpha is None:
        alpha = ceiling - 1e-3
    alpha = float(alpha)
    if not 1.0 < alpha <= ceiling * (1.0 + 1e-12):
        raise Infeasible(f"alpha must lie in (1, {ceiling:.6f}], got {alpha}")
    c_bound = gap * alpha / (alpha ** 2 - 1.0)
    if c_bound < 1.0 - 1e-12:
        raise Infeasible(f"state bound {c_bound} fell below 1; alpha too large")
    return StabilityParams(d_star=d_star, delta=delta, alpha=alpha,
                           alpha1=alpha1, alpha2=alpha2, c_bound=c_bound)


def feasibility_report(f, target_alpha):
    """Check the filter's feedback gain against a target alpha.

    The per-step feedback gain is at most the filter's l1 norm (projections
    are contractions), so h_l1 < target_alpha certifies the loop for any
    frame. Also reports the sigma-level bound cosh(pi / sqrt(sigma)).
    """
    target_alpha = float(target_alpha)
    h_l1 = f.h_l1
    bound = l1_growth_bound(f.sigma)
    return {
        "order": f.order,
        "sigma": f.sigma,
        "h_l1": h_l1,
        "l1_growth_bound": bound,
        "target_alpha": target_alpha,
        "passed": bool(h_l1 < target_alpha),
    }
