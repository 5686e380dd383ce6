"""Iterative plurality voting: best-response dynamics, equilibrium winners,
and adversarial welfare loss under Impartial Culture."""

from .core import (
    Profile,
    ScoreTable,
    UtilityVector,
    ValidationError,
    format_profile_text,
    pairwise_count,
    parse_profile_text,
    plurality_scores,
    plurality_winner,
    potential_winners,
)
from .dynamics import (
    BRStep,
    DEFAULT_MAX_STATES,
    DynamicsState,
    EquilibriumResult,
    ExplorationBudgetExceeded,
    apply_step,
    best_response_steps,
    equilibrium_winners,
    equilibrium_winners_exhaustive,
    equilibrium_winners_pruned,
    two_way_tiebreak,
)
from .montecarlo import (
    RunSummary,
    SamplerConfig,
    TieClassStats,
    estimate_eadpoa,
    rng_for_sample,
    sample_ic_profile,
    tie_statistics,
)
from .oracle import (
    EnumerationCapExceeded,
    EnumerationReport,
    check_binomial_tail_identity,
    check_stirling_ratio,
    enumerate_all_profiles,
    exact_eadpoa,
)
from .welfare import (
    LossReport,
    adversarial_loss,
    build_adversarial_tie_profile,
    loss_lower_bound,
    max_adversarial_loss_exhaustive,
    social_welfare,
)

__version__ = "0.1.0"

__all__ = [
    "BRStep",
    "DEFAULT_MAX_STATES",
    "DynamicsState",
    "EnumerationCapExceeded",
    "EnumerationReport",
    "EquilibriumResult",
    "ExplorationBudgetExceeded",
    "LossReport",
    "Profile",
    "RunSummary",
    "SamplerConfig",
    "ScoreTable",
    "TieClassStats",
    "UtilityVector",
    "ValidationError",
    "adversarial_loss",
    "apply_step",
    "best_response_steps",
    "build_adversarial_tie_profile",
    "check_binomial_tail_identity",
    "check_stirling_ratio",
    "enumerate_all_profiles",
    "equilibrium_winners",
    "equilibrium_winners_exhaustive",
    "equilibrium_winners_pruned",
    "estimate_eadpoa",
    "exact_eadpoa",
    "format_profile_text",
    "loss_lower_bound",
    "max_adversarial_loss_exhaustive",
    "pairwise_count",
    "parse_profile_text",
    "plurality_scores",
    "plurality_winner",
    "potential_winners",
    "rng_for_sample",
    "sample_ic_profile",
    "social_welfare",
    "tie_statistics",
    "two_way_tiebreak",
]
