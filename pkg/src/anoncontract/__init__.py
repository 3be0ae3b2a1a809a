"""Anonymous contracts for teams of agents with binary, individually observed outcomes."""

from .core import (
    TAU,
    Agent,
    ContractError,
    GuardError,
    Instance,
    InvariantViolation,
    ValidationError,
    dump_instance,
    load_instance,
    social_welfare,
    welfare_set,
)
from .equilibrium import (
    BLOCKED,
    AnonymousContract,
    EquilibriumReport,
    ImprovementCycleError,
    agent_utility,
    best_response_dynamics,
    check_pne,
    enumerate_pne,
    is_pne,
    joining_transfer,
    principal_utility,
)
from .probability import q_matrix, success_dist, success_dist_excluding
from .uniform import UniformSolution, solve_uniform, verify_unique_prefix_pne
from .llopt import LLSolution, SetResult, general_optimal, optimal_ll_anonymous, optimal_ll_for_set
from .noll import (
    ConditioningWarning,
    FullExtractionContract,
    KStarContract,
    SingularMatrixError,
    full_extraction,
    log_contract,
)
from .generators import (
    FamilySpec,
    build_family,
    gen_equal_c_harmonic,
    gen_equal_q_harmonic,
    gen_infeasible,
    gen_random,
    gen_spread,
    gen_tight_costs,
    gen_unbounded_gap,
    h_function,
    worst_case_q,
)
from .analysis import GapReport, gap_report, sweep

__all__ = [
    "TAU",
    "Agent",
    "ContractError",
    "GuardError",
    "Instance",
    "InvariantViolation",
    "ValidationError",
    "dump_instance",
    "load_instance",
    "social_welfare",
    "welfare_set",
    "BLOCKED",
    "AnonymousContract",
    "EquilibriumReport",
    "ImprovementCycleError",
    "agent_utility",
    "best_response_dynamics",
    "check_pne",
    "enumerate_pne",
    "is_pne",
    "joining_transfer",
    "principal_utility",
    "q_matrix",
    "success_dist",
    "success_dist_excluding",
    "UniformSolution",
    "solve_uniform",
    "verify_unique_prefix_pne",
    "LLSolution",
    "SetResult",
    "general_optimal",
    "optimal_ll_anonymous",
    "optimal_ll_for_set",
    "ConditioningWarning",
    "FullExtractionContract",
    "KStarContract",
    "SingularMatrixError",
    "full_extraction",
    "log_contract",
    "FamilySpec",
    "build_family",
    "gen_equal_c_harmonic",
    "gen_equal_q_harmonic",
    "gen_infeasible",
    "gen_random",
    "gen_spread",
    "gen_tight_costs",
    "gen_unbounded_gap",
    "h_function",
    "worst_case_q",
    "GapReport",
    "gap_report",
    "sweep",
]

__version__ = "0.1.0"
