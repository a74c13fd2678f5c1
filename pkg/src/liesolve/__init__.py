"""Structure-preserving integration of Lie systems on matrix Lie groups."""

from .algebra import (
    AlgebraBasis,
    CoefficientSet,
    assemble_A,
    assemble_A_derivatives,
    bernoulli,
    dexpinv,
)
from .integrators import (
    MAGNUS_CONVERGENCE_RADIUS,
    MIDPOINT_TABLE,
    RK4_TABLE,
    ButcherTable,
    GroupTrajectory,
    StepperConfig,
    integrate_group,
    magnus2_increment,
    magnus4_increment,
    magnus_radius_check,
    rk4_direct_step,
    rkmk_increment,
)
from .liesystem import (
    ActionDomainError,
    GroupAction,
    LieSystemSpec,
    Trajectory,
    estimate_order,
    global_error,
    solve,
    solve_direct_rk4,
)
from .matrixcore import (
    central_second_derivatives,
    commutator,
    frobenius_norm,
    mat_exp,
    square_matrix,
)

__all__ = [
    "ActionDomainError",
    "AlgebraBasis",
    "ButcherTable",
    "CoefficientSet",
    "GroupAction",
    "GroupTrajectory",
    "LieSystemSpec",
    "MAGNUS_CONVERGENCE_RADIUS",
    "MIDPOINT_TABLE",
    "RK4_TABLE",
    "StepperConfig",
    "Trajectory",
    "assemble_A",
    "assemble_A_derivatives",
    "bernoulli",
    "central_second_derivatives",
    "commutator",
    "dexpinv",
    "estimate_order",
    "frobenius_norm",
    "global_error",
    "integrate_group",
    "magnus2_increment",
    "magnus4_increment",
    "magnus_radius_check",
    "mat_exp",
    "rk4_direct_step",
    "rkmk_increment",
    "solve",
    "solve_direct_rk4",
    "square_matrix",
]
