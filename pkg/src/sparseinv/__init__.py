"""Sparse inverse covariance estimation.

Solves the weighted l1-penalized Gaussian maximum-likelihood problem over
positive definite matrices with a proximal Newton method whose inner Lasso
subproblems are handled by coordinate descent over an adaptively selected
free set. Ships synthetic Gaussian Markov random field generators, a
first-order reference solver for cross-checking, structure-recovery
metrics, and a command-line front end.
"""

from .activeset import BlockStructure, Partition, fixed_pairs, partition, threshold_pattern
from .datasets import (
    Dataset,
    GroundTruth,
    chain_precision,
    random_precision,
    sample_covariance,
    sample_gaussian,
)
from .direction import (
    DirectionState,
    coord_update,
    diagonal_direction,
    newton_direction,
    run_sweeps,
    soft_threshold,
)
from .linalg import (
    CholFactor,
    NotPositiveDefinite,
    cholesky,
    inverse_from_factor,
    logdet,
    symmetrize,
    trace_product,
)
from .linesearch import (
    LineSearchConfig,
    LineSearchFailed,
    StepResult,
    armijo_search,
    compute_delta,
)
from .metrics import RecoveryReport, recovery, relative_error
from .objective import (
    IterateState,
    Problem,
    make_iterate,
    min_norm_subgradient,
    objective_value,
    offdiag_penalty,
    penalty_value,
    smooth_gradient,
    smooth_value,
    uniform_penalty,
)
from .solver import (
    Solution,
    SolverConfig,
    SolverTrace,
    duality_gap,
    solve_newton,
    solve_reference,
)

__version__ = "0.1.0"

__all__ = [
    "BlockStructure",
    "CholFactor",
    "Dataset",
    "DirectionState",
    "GroundTruth",
    "IterateState",
    "LineSearchConfig",
    "LineSearchFailed",
    "NotPositiveDefinite",
    "Partition",
    "Problem",
    "RecoveryReport",
    "Solution",
    "SolverConfig",
    "SolverTrace",
    "StepResult",
    "armijo_search",
    "chain_precision",
    "cholesky",
    "compute_delta",
    "coord_update",
    "diagonal_direction",
    "duality_gap",
    "fixed_pairs",
    "inverse_from_factor",
    "logdet",
    "make_iterate",
    "min_norm_subgradient",
    "newton_direction",
    "objective_value",
    "offdiag_penalty",
    "partition",
    "penalty_value",
    "random_precision",
    "recovery",
    "relative_error",
    "run_sweeps",
    "sample_covariance",
    "sample_gaussian",
    "smooth_gradient",
    "smooth_value",
    "soft_threshold",
    "solve_newton",
    "solve_reference",
    "symmetrize",
    "threshold_pattern",
    "trace_product",
    "uniform_penalty",
    "__version__",
]
