"""Domain types for the three-tier funding simulation and organization setup.

Agents are partitioned into an input tier that senses opportunities, a hidden
tier that champions them, and an output tier that funds them.  Agent ids are
blocked by tier: inputs occupy 0..n_in-1, hidden agents n_in..n_in+n_hid-1,
and outputs the remainder, and stay stable for a whole run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, StructureError
from .rng import RandomStreams

__all__ = [
    "Tier",
    "Agent",
    "InfluenceGraph",
    "Opportunity",
    "Outcome",
    "Project",
    "EnvParams",
    "SimConfig",
    "new_organization",
    "validate_organization",
]


class Tier(enum.Enum):
    INPUT = "input"
    HIDDEN = "hidden"
    OUTPUT = "output"


class Outcome(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    UNRESOLVED = "unresolved"


@dataclass
class Agent:
    """A node with a tier, a perception accuracy, and a scalar status.

    ``accuracy`` is the sensing fidelity of input agents (hidden and output
    agents carry the neutral value 1.0); ``status`` is the relative standing
    that drives project selection.
    """

    id: int
    tier: Tier
    accuracy: float
    status: float = 1.0


@dataclass
class InfluenceGraph:
    """Layered weight matrices plus hidden-agent reputations.

    ``w_ih[i, h]`` is the relationship weight from input agent i to hidden
    agent h, ``w_ho[h, o]`` the advocacy-channel weight from hidden agent h
    to output agent o; both live in [0, 1].  ``rep_hid`` holds non-negative
    hidden-agent reputations that gate routing together with ``w_ih``.
    """

    w_ih: np.ndarray
    w_ho: np.ndarray
    rep_hid: np.ndarray

    @property
    def n_in(self) -> int:
        return self.w_ih.shape[0]

    @property
    def n_hid(self) -> int:
        return self.w_ih.shape[1]

    @property
    def n_out(self) -> int:
        return self.w_ho.shape[1]

    def copy(self) -> "InfluenceGraph":
        return InfluenceGraph(self.w_ih.copy(), self.w_ho.copy(), self.rep_hid.copy())

    def validate(self) -> None:
        if self.w_ih.ndim != 2 or self.w_ho.ndim != 2 or self.rep_hid.ndim != 1:
            raise StructureError("influence graph arrays have wrong dimensionality")
        if self.w_ho.shape[0] != self.n_hid or len(self.rep_hid) != self.n_hid:
            raise StructureError("influence graph layer sizes are inconsistent")
        for name, w in (("w_ih", self.w_ih), ("w_ho", self.w_ho)):
            if np.any(w < 0.0) or np.any(w > 1.0):
                raise StructureError(f"{name} has entries outside [0, 1]")
        if np.any(self.rep_hid < 0.0):
            raise StructureError("rep_hid has negative entries")
        if np.any(self.w_ih.sum(axis=1) <= 0.0):
            raise StructureError("an input row of w_ih has no positive entry")


@dataclass(frozen=True)
class Opportunity:
    """An environmental option with latent quality, sensed by one input agent.

    ``quality`` is the true success probability; it is never visible to the
    selecting output agents.
    """

    id: int
    quality: float
    origin: int


@dataclass
class Project:
    """An opportunity on its way through the advocacy chain."""

    opportunity: Opportunity
    perceived_quality: float
    champion: int | None = None
    selector: int | None = None
    funded: bool = False
    outcome: Outcome = Outcome.UNRESOLVED
    payoff: float | None = None


@dataclass(frozen=True)
class EnvParams:
    """Environment constants: arrival process, quality shape, stakes, horizon."""

    arrival_rate: float = 6.0
    quality_alpha: float = 1.0
    quality_beta: float = 1.0
    tension: float = 0.0
    horizon: int = 500

    def validate(self) -> None:
        if self.arrival_rate < 0:
            raise ConfigurationError("arrival_rate must be >= 0")
        if self.quality_alpha <= 0:
            raise ConfigurationError("quality_alpha must be > 0")
        if self.quality_beta <= 0:
            raise ConfigurationError("quality_beta must be > 0")
        if self.tension < 0:
            raise ConfigurationError("tension must be >= 0")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")


@dataclass(frozen=True)
class SimConfig:
    """All tunable constants of a simulation run.

    ``budget`` is the number of projects fundable per tick, ``tau`` the
    selection softness, ``eta_status``/``eta_rep`` the learning rates for
    statuses and reputations/edges.  ``sigma_max`` scales perception noise
    for a fully inaccurate agent and ``proposal_threshold`` is the perceived
    quality an input agent requires before advocating an opportunity
    (0 disables the filter).  ``w_min`` is the strength below which a
    decaying relationship severs outright (a row's last live edge never
    severs, so every input agent keeps some path to the hidden layer).
    ``eps_floor`` keeps statuses strictly positive.
    """

    n_in: int = 6
    n_hid: int = 8
    n_out: int = 2
    budget: int = 2
    tau: float = 0.5
    eta_status: float = 0.2
    eta_rep: float = 0.2
    normalize: bool = True
    sigma_max: float = 1.0
    proposal_threshold: float = 0.55
    w_min: float = 0.3
    eps_floor: float = 1e-6
    env: EnvParams = field(default_factory=EnvParams)
    seed: int = 1

    def validate(self) -> None:
        for name in ("n_in", "n_hid", "n_out"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.budget < 1:
            raise ConfigurationError("budget must be >= 1")
        if self.tau <= 0:
            raise ConfigurationError("tau must be > 0")
        if self.eta_status < 0:
            raise ConfigurationError("eta_status must be >= 0")
        if self.eta_rep < 0:
            raise ConfigurationError("eta_rep must be >= 0")
        if self.sigma_max < 0:
            raise ConfigurationError("sigma_max must be >= 0")
        if not 0.0 <= self.proposal_threshold <= 1.0:
            raise ConfigurationError("proposal_threshold must be in [0, 1]")
        if not 0.0 <= self.w_min < 1.0:
            raise ConfigurationError("w_min must be in [0, 1)")
        if self.eps_floor <= 0:
            raise ConfigurationError("eps_floor must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        self.env.validate()

    def with_learning_disabled(self) -> "SimConfig":
        return replace(self, eta_status=0.0, eta_rep=0.0)

    @property
    def n_agents(self) -> int:
        return self.n_in + self.n_hid + self.n_out


def new_organization(
    config: SimConfig,
    streams: RandomStreams | None = None,
    graph: InfluenceGraph | None = None,
) -> tuple[list[Agent], InfluenceGraph]:
    """Create the agents and influence graph for a fresh organization.

    Statuses and reputations start at 1.0 and all weights at 1.0 unless an
    externally built ``graph`` (e.g. from an emerged network or a decoded
    genome) is supplied, in which case its weights are copied and its layer
    sizes must match the config.  Input accuracies are drawn uniformly on
    [0, 1] from the perception substream; hidden and output agents get
    accuracy 1.0.
    """
    config.validate()
    if streams is None:
        streams = RandomStreams(config.seed)
    if graph is None:
        graph = InfluenceGraph(
            w_ih=np.ones((config.n_in, config.n_hid)),
            w_ho=np.ones((config.n_hid, config.n_out)),
            rep_hid=np.ones(config.n_hid),
        )
    else:
        if (graph.n_in, graph.n_hid, graph.n_out) != (config.n_in, config.n_hid, config.n_out):
            raise ConfigurationError(
                "n_in/n_hid/n_out must match the supplied graph "
                f"({graph.n_in}/{graph.n_hid}/{graph.n_out})"
            )
        graph = graph.copy()
    accuracies = streams.perception.uniform(0.0, 1.0, size=config.n_in)
    agents: list[Agent] = []
    next_id = 0
    for i in range(config.n_in):
        agents.append(Agent(id=next_id, tier=Tier.INPUT, accuracy=float(accuracies[i])))
        next_id += 1
    for _ in range(config.n_hid):
        agents.append(Agent(id=next_id, tier=Tier.HIDDEN, accuracy=1.0))
        next_id += 1
    for _ in range(config.n_out):
        agents.append(Agent(id=next_id, tier=Tier.OUTPUT, accuracy=1.0))
        next_id += 1
    validate_organization(agents, graph, config)
    return agents, graph


def validate_organization(agents: list[Agent], graph: InfluenceGraph, config: SimConfig) -> None:
    """Walk every type invariant; raises StructureError on the first violation."""
    if len(agents) != config.n_agents:
        raise StructureError("agent count does not match configured layer sizes")
    ids = [a.id for a in agents]
    if ids != list(range(len(agents))):
        raise StructureError("agent ids must be 0..n-1 in tier-block order")
    for a in agents:
        expected = (
            Tier.INPUT
            if a.id < config.n_in
            else Tier.HIDDEN
            if a.id < config.n_in + config.n_hid
            else Tier.OUTPUT
        )
        if a.tier is not expected:
            raise StructureError(f"agent {a.id} has tier {a.tier}, expected {expected}")
        if not 0.0 <= a.accuracy <= 1.0:
            raise StructureError(f"agent {a.id} accuracy outside [0, 1]")
        if a.status < 0.0:
            raise StructureError(f"agent {a.id} has negative status")
    if (graph.n_in, graph.n_hid, graph.n_out) != (config.n_in, config.n_hid, config.n_out):
        raise StructureError("graph layer sizes do not match the config")
    graph.validate()
