"""Low-bit Sigma-Delta quantization of fusion-frame measurements.

The package covers the full pipeline: subspace frames and their operators,
simplex alphabets, the stable high-order quantization loop, the block
operators that shape its error, canonical and Sobolev reconstruction, and
an experiment harness for error-decay and stability studies.
"""

from .alphabets import Alphabet, frame_alphabets, simplex_alphabet
from .block_ops import (BasisEmbedding, BlockOperator, apply_difference,
                        apply_difference_transpose, cofactor_coordinate_sparse,
                        cofactor_norm, difference_inv_pow, difference_op,
                        factorization_residual, feedback_op, op_norm, shaping_cofactor,
                        shaping_cofactor_banded, solve_difference,
                        solve_difference_transpose)
from .duals import (LeftInverse, canonical_left_inverse, error_diagnostics, l_dr_norm,
                    reconstruct, sobolev_left_inverse)
from .errors import (BadData, BadParameter, DimensionMismatch, FusionSDError,
                     IllConditionedWarning, Infeasible, NoConvergence, NotAFrame,
                     RankDeficient, StabilityViolationWarning, WeightedFrame)
from .experiments import (CSV_HEADER, ExperimentConfig, ResultRow, decode_indices,
                          example1_config, example2_config, fit_slope, read_result_csv,
                          run_experiment, stability_trials, write_index_stream,
                          write_plot_script)
from .filters import (FilterSpec, StabilityParams, build_filter, cofactor_coefficient,
                      cofactor_coefficients, feasibility_report, l1_growth_bound,
                      min_sigma_for_alpha, stability_params)
from .frames import (BlockVector, FusionFrame, Subspace, example_frame_r3,
                     example_normals_r3, random_frame, require_frame)
from .linalg import lstsq_solve, orthonormalize, spectral_norm
from .sigma_delta import (RunResult, feedback_terms, ffsd_run, memoryless_run,
                          recursion_residual)
from .verify import verify_suite

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "BadData", "BadParameter", "BasisEmbedding", "BlockOperator",
    "BlockVector", "CSV_HEADER", "DimensionMismatch", "ExperimentConfig",
    "FilterSpec", "FusionFrame", "FusionSDError", "IllConditionedWarning",
    "Infeasible", "LeftInverse", "NoConvergence", "NotAFrame", "RankDeficient",
    "ResultRow", "RunResult", "StabilityParams", "StabilityViolationWarning",
    "Subspace", "WeightedFrame", "apply_difference", "apply_difference_transpose",
    "build_filter", "canonical_left_inverse", "cofactor_coefficient",
    "cofactor_coefficients", "cofactor_coordinate_sparse", "cofactor_norm",
    "decode_indices", "difference_inv_pow", "difference_op", "error_diagnostics",
    "example1_config", "example2_config", "example_frame_r3", "example_normals_r3",
    "factorization_residual", "feasibility_report", "feedback_op", "feedback_terms",
    "ffsd_run", "fit_slope", "frame_alphabets", "l1_growth_bound", "l_dr_norm",
    "lstsq_solve", "memoryless_run", "min_sigma_for_alpha", "op_norm",
    "orthonormalize", "random_frame", "read_result_csv", "reconstruct",
    "recursion_residual", "require_frame", "run_experiment", "shaping_cofactor",
    "shaping_cofactor_banded", "simplex_alphabet", "sobolev_left_inverse",
    "solve_difference", "solve_difference_transpose", "spectral_norm",
    "stability_params", "stability_trials", "verify_suite", "write_index_stream",
    "write_plot_script",
]
