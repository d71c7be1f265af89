"""Solvers and convergence studies for 1-D time-fractional reaction-diffusion.

The package implements a second-order product-integration scheme on a
three-piece graded temporal mesh for

    D_t^a u - p u_xx + c(x) u = f(x, t),   0 < a < 1 (Caputo),

together with standard and preprocessed L1 baselines on power-graded
meshes, manufactured test problems, and a harness that reproduces the
reference error/rate tables.
"""

from .backend import get_backend, set_backend
from .errors import (
    ConvergenceFailure,
    DomainError,
    InvalidArgumentError,
    MeshConstructionError,
    ProviderMismatchError,
    SolverError,
    SubdiffError,
)
from .harness import ConvergenceReport, SweepConfig, max_error, rate, run_sweep
from .integral_scheme import QuadWeights, SolutionGrid, solve, weight_a, weight_b
from .l1 import L1Config, l1_coefficients, l1_solve, make_l1_config, optimal_grading
from .meshes import (
    SpatialMesh,
    TemporalMesh,
    build_power_mesh,
    build_spatial_mesh,
    build_three_piece_mesh,
)
from .operators import DiscreteOperator, apply_discrete_operator
from .problems import (
    DecomposedProblem,
    ExactSolution,
    ProblemSpec,
    compute_z,
    compute_z_dd,
    custom_problem,
    decompose,
    example_problem,
    g_term,
    G_term,
)
from .properties import run_property_suite
from .special import MLParams, beta_fn, gamma_fn, mittag_leffler

__version__ = "0.1.0"

__all__ = [
    "ConvergenceFailure", "ConvergenceReport", "DecomposedProblem",
    "DiscreteOperator", "DomainError", "ExactSolution", "InvalidArgumentError",
    "L1Config", "MLParams", "MeshConstructionError", "ProblemSpec",
    "ProviderMismatchError", "QuadWeights", "SolutionGrid", "SolverError",
    "SpatialMesh", "SubdiffError", "SweepConfig", "TemporalMesh",
    "apply_discrete_operator", "beta_fn", "build_power_mesh",
    "build_spatial_mesh", "build_three_piece_mesh", "compute_z",
    "compute_z_dd", "custom_problem", "decompose", "example_problem",
    "g_term", "G_term", "gamma_fn", "get_backend", "l1_coefficients",
    "l1_solve", "make_l1_config", "max_error", "mittag_leffler",
    "optimal_grading", "rate", "run_property_suite", "run_sweep",
    "set_backend", "solve", "weight_a", "weight_b",
]
