"""Numerical solution of fractional initial value problems with the
Atangana-Baleanu derivative, together with the fractional operators and
special functions they are built on."""

from abfode.closed_forms import (
    ReferenceCurve,
    classical_logistic,
    exact_example1,
    exact_example1_half,
    exact_example3,
    rk4_reference,
)
from abfode.operators import (
    Mesh,
    SampledFunction,
    ab_caputo_derivative,
    ab_integral,
    ab_rl_derivative,
)
from abfode.solver import (
    ImplicitSolveError,
    Problem,
    RhsSpec,
    SolverConfig,
    Trajectory,
    corrector_step,
    integrate,
    predictor_step,
    solve_implicit,
)
from abfode.special import (
    DomainError,
    MlConfig,
    NonConvergenceError,
    Order,
    ab_kernel,
    b_normalization,
    gamma_ln,
    mittag_leffler,
)
from abfode.weights import WeightTable, rectangle_weights, trapezoid_weights, weight_table

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "ImplicitSolveError",
    "Mesh",
    "MlConfig",
    "NonConvergenceError",
    "Order",
    "Problem",
    "ReferenceCurve",
    "RhsSpec",
    "SampledFunction",
    "SolverConfig",
    "Trajectory",
    "WeightTable",
    "ab_caputo_derivative",
    "ab_integral",
    "ab_kernel",
    "ab_rl_derivative",
    "b_normalization",
    "classical_logistic",
    "corrector_step",
    "exact_example1",
    "exact_example1_half",
    "exact_example3",
    "gamma_ln",
    "integrate",
    "mittag_leffler",
    "predictor_step",
    "rectangle_weights",
    "rk4_reference",
    "solve_implicit",
    "trapezoid_weights",
    "weight_table",
]
