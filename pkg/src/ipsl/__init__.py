"""Deterministic simulator of influence-process structural learning.

Three connected models: a status-weighted project-funding loop in which
success feedback reshapes statuses, reputations, and relationship weights; a
preferential-attachment generator whose degree hierarchy yields the
three-tier structure the loop runs on; and a genetic algorithm that evolves
the influence weights themselves against an output-layer payoff fitness.
"""

from .core import (
    Agent,
    EnvParams,
    InfluenceGraph,
    Opportunity,
    Outcome,
    Project,
    SimConfig,
    Tier,
    new_organization,
)
from .emergence import (
    TierAssignment,
    UndirectedGraph,
    assign_tiers,
    degree_distribution,
    fit_power_law,
    grow_network,
    to_influence_graph,
)
from .engine import OrgState, TickRecord, run, simulate, step
from .errors import (
    CodecError,
    ConfigurationError,
    ContractViolationError,
    EstimationError,
    IpslError,
    StructureError,
    UndefinedResultError,
)
from .evolution import (
    FitnessReport,
    GAConfig,
    Genome,
    decode,
    encode,
    evaluate_fitness,
    evolve,
)
from .experiment import EmergenceParams, ExperimentConfig, parse_config
from .metrics import SeriesSummary, gini, spearman, summarize
from .rng import RandomStreams
from .runner import execute

__all__ = [
    "Agent",
    "CodecError",
    "ConfigurationError",
    "ContractViolationError",
    "EmergenceParams",
    "EnvParams",
    "EstimationError",
    "ExperimentConfig",
    "FitnessReport",
    "GAConfig",
    "Genome",
    "InfluenceGraph",
    "IpslError",
    "Opportunity",
    "OrgState",
    "Outcome",
    "Project",
    "RandomStreams",
    "SeriesSummary",
    "SimConfig",
    "StructureError",
    "Tier",
    "TickRecord",
    "TierAssignment",
    "UndefinedResultError",
    "UndirectedGraph",
    "assign_tiers",
    "decode",
    "degree_distribution",
    "encode",
    "evaluate_fitness",
    "evolve",
    "execute",
    "fit_power_law",
    "gini",
    "grow_network",
    "new_organization",
    "parse_config",
    "run",
    "simulate",
    "spearman",
    "step",
    "summarize",
    "to_influence_graph",
]

__version__ = "0.1.0"
