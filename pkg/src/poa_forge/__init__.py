"""Price-of-anarchy toolkit for distributed resource-allocation games.

Computes, optimizes and empirically certifies the price of anarchy of
utility-design mechanisms over submodular, set-covering and supermodular
welfare, with a congestion-game best-response engine and an exhaustive
equilibrium oracle for desk-scale verification.
"""

from .errors import (
    DegenerateInstanceError,
    InfeasibleAllocationError,
    InternalSolverError,
    InvalidParameterError,
    PreconditionError,
    SizeCapError,
)
from .mechanisms import (
    Mechanism,
    WelfareBasis,
    check_assumption,
    covering_basis,
    curvature,
    gairing_optimal_covering,
    marginal_contribution,
    power_basis,
    shapley_value,
    vehicle_target_basis,
)
from .lp import (
    IndexTuple,
    LinearProgram,
    PoaReport,
    design_optimal_mechanism,
    design_optimal_mechanism_submodular,
    dump_lp,
    enumerate_index_set,
    poa_dual_lp,
    solve_lp,
)
from .closed_forms import (
    BetaProfile,
    approximation_ratio_curvature,
    beta_profile,
    poa_closed_auto,
    poa_covering,
    poa_covering_nonincreasing,
    poa_marginal_submodular,
    poa_shapley_reformulated,
    poa_shapley_submodular,
    poa_submodular,
    poa_supermodular,
)
from .games import (
    Allocation,
    DynamicsTrace,
    GameInstance,
    StructuredActionSet,
    best_response,
    evaluate_utility,
    evaluate_welfare,
    exhaustive_oracle,
    is_nash,
    matroid_check,
    potential,
    run_best_response_dynamics,
)
from .generators import (
    ContentDistributionConfig,
    VehicleTargetConfig,
    gen_content_distribution,
    gen_vehicle_target,
    total_query_mass,
)

__version__ = "0.1.0"
