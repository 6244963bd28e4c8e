"""Solvers for monotone two-variable-per-inequality systems and discounted shortest paths."""

from .certificates import (
    Certificate,
    NegBicycleCert,
    NegUnitGainCert,
    verify_certificate,
)
from .core import (
    Edge,
    EMPTY_SUMMARY,
    Ext,
    Graph,
    NEG_INF,
    NegativeUnitGain,
    POS_INF,
    ParseError,
    Rational,
    Walk,
    WalkSummary,
    compose,
    cycle_bound,
    evaluate_solution,
    format_instance,
    parse_instance,
    propagate,
)
from .kcycle import KCycleResult, phi_vk
from .locate import (
    CycleLocateOutcome,
    LocateResult,
    ViolationWitness,
    locate_cycle,
    locate_global,
    locate_value,
)
from .dapsp import (
    DiscountedDistances,
    EnvelopeStructure,
    HittingSet,
    ReducedInstance,
    SourceTable,
    UniformInstance,
    build_envelope,
    build_hitting_set,
    delta_from_source,
    delta_to_target,
    format_uniform,
    madani_reduce,
    minimal_optimal_walk,
    parse_uniform,
    psi_star,
    reduce_sources_v1,
    reduce_sources_v2,
    solve_dapsp,
)
from .generators import (
    dapsp_random,
    dmdp_random,
    feasible_random,
    infeasible_bicycle,
    planted_long_cycle,
    planted_unit_cycle,
)
from .reconstruct import NoWalk, reconstruct_walk
from .solver import (
    NoTightEdge,
    NotFeasible,
    NotMaximal,
    SolveOutcome,
    Verified,
    XStar,
    compute_ystar,
    dmdp_policy,
    solve_simple,
    verify_extended,
    verify_solution,
)
from .tradeoff import (
    CompressedInstance,
    InfeasibleDetected,
    build_compressed,
    rederive_edge_walk,
    sample_size,
    solve_tradeoff,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CompressedInstance",
    "CycleLocateOutcome",
    "DiscountedDistances",
    "Edge",
    "EMPTY_SUMMARY",
    "EnvelopeStructure",
    "Ext",
    "Graph",
    "HittingSet",
    "InfeasibleDetected",
    "KCycleResult",
    "LocateResult",
    "NEG_INF",
    "NegBicycleCert",
    "NegUnitGainCert",
    "NegativeUnitGain",
    "NoTightEdge",
    "NoWalk",
    "NotFeasible",
    "NotMaximal",
    "POS_INF",
    "ParseError",
    "Rational",
    "ReducedInstance",
    "SolveOutcome",
    "SourceTable",
    "UniformInstance",
    "Verified",
    "ViolationWitness",
    "Walk",
    "WalkSummary",
    "XStar",
    "build_compressed",
    "build_envelope",
    "build_hitting_set",
    "compose",
    "compute_ystar",
    "cycle_bound",
    "dapsp_random",
    "delta_from_source",
    "delta_to_target",
    "dmdp_policy",
    "dmdp_random",
    "evaluate_solution",
    "feasible_random",
    "format_instance",
    "format_uniform",
    "infeasible_bicycle",
    "locate_cycle",
    "locate_global",
    "locate_value",
    "madani_reduce",
    "minimal_optimal_walk",
    "parse_instance",
    "parse_uniform",
    "phi_vk",
    "planted_long_cycle",
    "planted_unit_cycle",
    "psi_star",
    "rederive_edge_walk",
    "reconstruct_walk",
    "sample_size",
    "solve_dapsp",
    "solve_simple",
    "solve_tradeoff",
    "verify_certificate",
    "verify_extended",
    "verify_solution",
    "__version__",
]
