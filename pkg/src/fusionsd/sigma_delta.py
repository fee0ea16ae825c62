"""The sequential low-bit quantization loop and its memoryless baseline.

Each step quantizes the current measurement plus filtered feedback of the
accumulated quantization error:

    z_n = y_n + sum_j h_j * P_n P_{n-1} ... P_{n-j+1} v_{n-j}
    q_n = nearest alphabet element to z_n
    v_n = z_n - q_n

with v_0 = v_{-1} = ... = 0. The feedback taps shape the error so that a
matched left inverse can cancel it to high order; the loop itself only
needs the per-subspace alphabets and the last L states.
"""

import warnings

import numpy as np

from .alphabets import frame_alphabets
from .errors import BadParameter, DimensionMismatch, StabilityViolationWarning, WeightedFrame
from .frames import BlockVector

MEMBERSHIP_TOL = 1e-8


class RunResult:
    """Outputs of one quantization run over a frame."""

    def __init__(self, q, q_indices, v, state_norms):
        self.q = q
        self.q_indices = np.asarray(q_indices, dtype=int)
        self.v = v
        self.state_norms = np.asarray(state_norms, dtype=float)
        self.max_state_norm = float(self.state_norms.max()) if len(state_norms) else 0.0

    def __repr__(self):
        return (f"RunResult(n_blocks={self.q.n_blocks}, "
                f"max_state_norm={self.max_state_norm:.6g})")


def _check_measurements(frame, y):
    if y.n_blocks != len(frame) or y.ambient_dim != frame.ambient_dim:
        raise DimensionMismatch(
            f"expected {len(frame)} measurement blocks of dimension {frame.ambient_dim}")
    res = frame.membership_residual(y)
    if res > MEMBERSHIP_TOL:
        raise BadParameter(
            f"measurement blocks must lie in their subspaces (residual {res:.3e})")


def ffsd_run(frame, f, y, alphabets=None, stability=None):
    """Run the filtered quantization loop over all measurement blocks.

    The frame must be unweighted; the loop's feedback analysis assumes the
    measurements are plain projections. The tap term at step n is
    h_j P_n ... P_{n-j+1} v_{n-j}, kept incrementally: a buffer row a holds
    the previous state v_{n-1-a} pushed forward through the projectors up
    to step n-1, so one application of P_n per step advances every chain at
    once. This is the same sequence of projector applications as evaluating
    each chain from scratch; the identity is cross-checked by
    recursion_residual, which recomputes the chains independently.

    When a StabilityParams is supplied and the inputs actually satisfy the
    norm bound ||y_n|| <= delta, exceeding the certified state bound is
    impossible for a correct implementation, so it is reported as a
    StabilityViolationWarning rather than an error.
    """
    if not frame.is_unweighted:
        raise WeightedFrame("the quantization loop requires an unweighted frame")
    _check_measurements(frame, y)
    if alphabets is None:
        alphabets = frame_alphabets(frame)
    if len(alphabets) != len(frame):
        raise DimensionMismatch("need one alphabet per subspace")

    n_blocks = len(frame)
    d = frame.ambient_dim
    projs = frame.projector_array
    taps = f.taps()
    depth = f.length

    q_blocks = np.empty((n_blocks, d))
    v_blocks = np.empty((n_blocks, d))
    q_indices = np.empty(n_blocks, dtype=int)
    state_norms = np.empty(n_blocks)
    history = np.zeros((depth, d))

    for t in range(n_blocks):
        pushed = history @ projs[t]  # projectors are exactly symmetric
        z = y.blocks[t].copy()
        for lag, coeff in taps:
            z += coeff * pushed[lag - 1]
        element, index = alphabets[t].quantize(z)
        v = z - element
        q_blocks[t] = element
        v_blocks[t] = v
        q_indices[t] = index
        state_norms[t] = np.linalg.norm(v)
        history[1:] = pushed[:-1]
        history[0] = v

    result = RunResult(BlockVector(q_blocks), q_indices, BlockVector(v_blocks), state_norms)
    if stability is not None and y.norm_inf() <= stability.delta + 1e-12:
        if result.max_state_norm > stability.c_bound + 1e-9:
            warnings.warn(
                f"state norm {result.max_state_norm:.6g} exceeded the certified bound "
                f"{stability.c_bound:.6g} on in-range inputs; this indicates a bug",
                StabilityViolationWarning)
    return result


def memoryless_run(frame, y, alphabets=None):
    """Quantize each measurement independently, no feedback state."""
    if y.n_blocks != len(frame) or y.ambient_dim != frame.ambient_dim:
        raise DimensionMismatch(
            f"expected {len(frame)} measurement blocks of dimension {frame.ambient_dim}")
    if alphabets is None:
        alphabets = frame_alphabets(frame)
    n_blocks = len(frame)
    q_blocks = np.empty((n_blocks, frame.ambient_dim))
    q_indices = np.empty(n_blocks, dtype=int)
    for t in range(n_blocks):
        q_blocks[t], q_indices[t] = alphabets[t].quantize(y.blocks[t])
    v = BlockVector(y.blocks - q_blocks)
    norms = np.linalg.norm(v.blocks, axis=1)
    return RunResult(BlockVector(q_blocks), q_indices, v, norms)


def feedback_terms(frame, f, v):
    """Tap sums sum_j h_j P_n ... P_{n-j+1} v_{n-j} for every step n.

    Each chain is evaluated from scratch from the stored states, with no
    incremental buffering, so this serves as an independent oracle for the
    loop's feedback arithmetic.
    """
    projs = frame.projector_array
    n_blocks = len(frame)
    out = np.zeros_like(v.blocks)
    for t in range(n_blocks):
        for lag, coeff in f.taps():
            if lag > t:
                continue
            w = v.blocks[t - lag]
            for s in range(t - lag + 1, t + 1):
                w = projs[s] @ w
            out[t] += coeff * w
    return BlockVector(out)


def recursion_residual(frame, f, y, result):
    """Defect of the run against the defining recursion, in direct-sum norm.

    Computes ||y - q - v + (tap terms)|| with the tap terms rebuilt by
    feedback_terms. A faithful run keeps this at rounding level, at most
    1e-10 relative to the input size.
    """
    terms = feedback_terms(frame, f, result.v)
    defect = y.blocks - result.q.blocks - result.v.blocks + terms.blocks
    return float(np.linalg.norm(defect))
