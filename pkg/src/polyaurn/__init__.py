"""Simulation and exact computation for urns with unfair reinforcement.

A drawn ball of colour i is returned together with m_i new balls of its
colour.  The package simulates the discrete chain and its continuous-time
branching embedding, computes exact state distributions and dominance
survival curves, estimates them by replicated Monte Carlo with
reproducible parallel streams, and exposes the statistical tests used to
verify the two against each other.
"""

from ._kernels import backend
from .embedding import (
    ContinuousTrajectory,
    ScaledSample,
    jump_chain,
    next_event,
    run_until,
    scaled_sample,
)
from .errors import (
    BudgetExceededError,
    EventCapError,
    HorizonError,
    PathCapError,
    StateBudgetError,
    TailMassError,
    UrnModelError,
)
from .exact import (
    BirthProcessDistribution,
    StateDistribution,
    SurvivalCurve,
    aggregate_paths,
    birth_process_distribution,
    enumerate_paths,
    state_distribution,
    survival_probability,
)
from .montecarlo import (
    EstimateWithCI,
    ExperimentPlan,
    RatioStats,
    ScaledLimitSample,
    embed_replications,
    estimate_dominance,
    estimate_ratio_stats,
    sample_scaled_limits,
    simulate_replications,
    survival_curve_mc,
)
from .rng import UniformStream, derive_replication_seed, mix64
from .stats import GofResult, chi_square_gof, ks_distance, wilson_interval
from .urn import (
    CRITERION_KINDS,
    DominanceCriterion,
    ReplacementRule,
    Trajectory,
    UrnState,
    check_dominance_prefix,
    draw_step,
    new_urn,
    pick_colour,
    run_trajectory,
    two_block_path,
)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    "backend",
    # urn
    "CRITERION_KINDS",
    "DominanceCriterion",
    "ReplacementRule",
    "Trajectory",
    "UrnState",
    "check_dominance_prefix",
    "draw_step",
    "new_urn",
    "pick_colour",
    "run_trajectory",
    "two_block_path",
    # embedding
    "ContinuousTrajectory",
    "ScaledSample",
    "jump_chain",
    "next_event",
    "run_until",
    "scaled_sample",
    # exact
    "BirthProcessDistribution",
    "StateDistribution",
    "SurvivalCurve",
    "aggregate_paths",
    "birth_process_distribution",
    "enumerate_paths",
    "state_distribution",
    "survival_probability",
    # monte carlo
    "EstimateWithCI",
    "ExperimentPlan",
    "RatioStats",
    "ScaledLimitSample",
    "embed_replications",
    "estimate_dominance",
    "estimate_ratio_stats",
    "sample_scaled_limits",
    "simulate_replications",
    "survival_curve_mc",
    # stats
    "GofResult",
    "chi_square_gof",
    "ks_distance",
    "wilson_interval",
    # rng
    "UniformStream",
    "derive_replication_seed",
    "mix64",
    # errors
    "UrnModelError",
    "HorizonError",
    "BudgetExceededError",
    "StateBudgetError",
    "PathCapError",
    "EventCapError",
    "TailMassError",
]
