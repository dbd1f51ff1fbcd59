"""Extreme Perron roots over row-wise entry permutations of nonnegative matrices."""

from .analysis import (BoundReport, EquivalenceVerdict, bound_report, detect_equality_case,
                       epsilon_bound_reports, verify_equality_equivalence)
from .core import (as_matrix, as_permutation, compose, epsilon_perturb, identity_permutation, in_omega,
                   inverse, is_identity, is_positive, mean_row_sum, permutation_matrix, permute_cols,
                   permute_rows, row_signature, row_sums, sort_rows)
from .exceptions import (DimensionMismatch, DimensionTooLarge, InvariantViolation, LoopCountWarning,
                         LoopLimitWarning, MatrixFormatError, NoConvergence, NonPositiveVector,
                         PermPerronError, PreconditionFailed, ReducibleWarning, ResidualTooLarge)
from .experiments import (Distribution, ExperimentConfig, LoopStats, random_matrix,
                          run_convergence_experiment)
from .optimize import (OptimizeResult, OptimizeTrace, align_to_vector, is_max_optimal, is_min_optimal,
                       maximize_rho, minimize_rho)
from .oracle import OracleReport, enumerate_omega, omega_size, oracle_extremes
from .spectral import (CWBounds, PerronPair, cw_bounds, is_fully_indecomposable, is_irreducible, perron,
                       rearrangement_extremes, strict_improvement_certificate)

__version__ = "0.1.0"
