"""The status-weighted project funding loop.

Each tick composes six stages: opportunity generation, noisy perception,
reputation-gated routing to hidden-layer champions, status-only selection
under a funding budget, outcome realization, and multiplicative credit
assignment back along the advocacy chain.  Output agents never see latent or
perceived quality; the only information their selection uses is champion
status, so any improvement in funded-project success rates has to come from
structural learning.

Randomness is drawn from named substreams in a fixed per-tick order:

1. environment: one Poisson count, then a Beta vector and an origin vector
   of that size (one call each);
2. perception: one standard normal per generated opportunity, in order;
3. routing: one uniform per advocated proposal (zero-gate proposals are
   dropped without a draw);
4. selection: one uniform per funding draw, only when more proposals are
   championed than the budget allows;
5. outcomes: one uniform per funded project, in funding order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

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
    validate_organization,
)
from .errors import ContractViolationError
from .metrics import spearman
from .rng import RandomStreams
from .errors import UndefinedResultError

__all__ = [
    "TickRecord",
    "OrgState",
    "generate_opportunities",
    "perceive",
    "route_proposals",
    "selection_probabilities",
    "select_projects",
    "realize_outcome",
    "backpropagate",
    "step",
    "simulate",
    "run",
]


@dataclass
class TickRecord:
    """Per-tick metric capture of the funding loop."""

    tick: int
    generated: int
    championed: int
    funded: int
    successes: int
    mean_status_in: float
    mean_status_hid: float
    mean_status_out: float
    spearman_acc_weight: float  # NaN when undefined (e.g. zero rank variance)


@dataclass
class OrgState:
    """Mutable state of one organization over one run."""

    agents: list[Agent]
    graph: InfluenceGraph
    config: SimConfig
    tick: int = 0
    next_opportunity_id: int = 0
    funded_log: list[Project] = field(default_factory=list)

    @property
    def input_accuracies(self) -> np.ndarray:
        return np.array([a.accuracy for a in self.agents[: self.config.n_in]])

    def hidden_statuses(self) -> np.ndarray:
        lo = self.config.n_in
        return np.array([a.status for a in self.agents[lo : lo + self.config.n_hid]])

    def layer_agents(self, tier: Tier) -> list[Agent]:
        return [a for a in self.agents if a.tier is tier]


def generate_opportunities(
    env: EnvParams, n_in: int, rng: np.random.Generator, start_id: int = 0
) -> list[Opportunity]:
    """Draw this tick's opportunities from the environment substream.

    The count is Poisson(arrival_rate); each opportunity gets a latent
    quality ~ Beta(quality_alpha, quality_beta) and a uniformly random
    origin among the input agents.  Ids are assigned consecutively from
    ``start_id`` so they increase monotonically across a run.
    """
    env.validate()
    count = int(rng.poisson(env.arrival_rate))
    if count == 0:
        return []
    qualities = rng.beta(env.quality_alpha, env.quality_beta, size=count)
    origins = rng.integers(0, n_in, size=count)
    return [
        Opportunity(id=start_id + k, quality=float(qualities[k]), origin=int(origins[k]))
        for k in range(count)
    ]


def perceive(
    agent: Agent, opp: Opportunity, sigma_max: float, rng: np.random.Generator
) -> float:
    """Return the origin agent's noisy reading of an opportunity's quality.

    The reading is clamp(q + eps, 0, 1) with eps ~ Normal(0, sigma_max *
    (1 - accuracy)); a fully accurate agent reads the latent quality
    exactly.  Consumes one standard normal draw regardless of the noise
    scale, so perception replays identically across learning ablations.
    """
    if agent.tier is not Tier.INPUT:
        raise ContractViolationError(f"agent {agent.id} is not an input agent")
    if agent.id != opp.origin:
        raise ContractViolationError(
            f"agent {agent.id} cannot perceive opportunity originated by {opp.origin}"
        )
    sigma = sigma_max * (1.0 - agent.accuracy)
    eps = sigma * rng.standard_normal()
    return min(1.0, max(0.0, opp.quality + eps))


def route_proposals(
    graph: InfluenceGraph, projects: list[Project], rng: np.random.Generator
) -> list[Project]:
    """Assign a hidden-layer champion to each advocated proposal.

    For a proposal originated by input agent i, champion h is sampled with
    probability proportional to w_ih[i, h] * rep_hid[h].  Proposals whose
    gate products are all zero are dropped (broken network, not
    renormalized away).  Output order follows input order.  Champion ids
    are global agent ids (hidden block starts at n_in).
    """
    routed: list[Project] = []
    for project in projects:
        if project.champion is not None:
            raise ContractViolationError("proposal already has a champion")
        origin = project.opportunity.origin
        gates = graph.w_ih[origin] * graph.rep_hid
        total = float(gates.sum())
        if total <= 0.0:
            continue
        cum = np.cumsum(gates)
        u = rng.random() * total
        h = int(np.searchsorted(cum, u, side="right"))
        h = min(h, graph.n_hid - 1)
        project.champion = graph.n_in + h
        routed.append(project)
    return routed


def selection_probabilities(champ_statuses: np.ndarray, tau: float) -> np.ndarray:
    """Softmax over champion statuses at temperature tau, computed stably.

    Subtracting the max before exponentiating makes the distribution exactly
    shift-invariant up to rounding, which is the selection-blindness
    property: adding a constant to every status leaves funding odds intact.
    """
    z = (champ_statuses - champ_statuses.max()) / tau
    e = np.exp(z)
    return e / e.sum()


def select_projects(
    output_ids: list[int],
    championed: list[Project],
    champ_statuses: np.ndarray,
    budget: int,
    tau: float,
    rng: np.random.Generator,
) -> list[Project]:
    """Fund up to ``budget`` championed projects by status-softmax sampling.

    Projects are drawn without replacement, each draw with probability
    proportional to exp(status(champion)/tau); latent and perceived quality
    are never consulted.  When the number championed is within budget, all
    are funded in input order without consuming randomness.  Each funded
    project gets a selector output agent round-robin by draw order.
    As tau -> 0 selection degenerates to strict argmax; tau == 0 is accepted
    as that limit, with ties broken by lowest project id.
    """
    if budget < 1:
        raise ContractViolationError("budget must be >= 1")
    if tau < 0:
        raise ContractViolationError("tau must be >= 0")
    if len(champ_statuses) != len(championed):
        raise ContractViolationError("one status per championed project is required")
    funded: list[Project] = []

    def fund(project: Project) -> None:
        project.funded = True
        project.selector = output_ids[len(funded) % len(output_ids)]
        funded.append(project)

    if len(championed) <= budget:
        for project in championed:
            fund(project)
        return funded

    remaining = list(range(len(championed)))
    statuses = np.asarray(champ_statuses, dtype=float)
    for _ in range(budget):
        if tau == 0.0:
            pick = min(
                remaining,
                key=lambda j: (-statuses[j], championed[j].opportunity.id),
            )
        else:
            probs = selection_probabilities(statuses[remaining], tau)
            u = rng.random()
            k = int(np.searchsorted(np.cumsum(probs), u, side="right"))
            pick = remaining[min(k, len(remaining) - 1)]
        remaining.remove(pick)
        fund(championed[pick])
    return funded


def realize_outcome(project: Project, tension: float, rng: np.random.Generator) -> Outcome:
    """Resolve a funded project against the environment.

    Success happens with probability equal to the latent quality; the payoff
    is +(1+tension) on success and -(1+tension) on failure, so tension
    widens the stakes symmetrically.
    """
    if not project.funded:
        raise ContractViolationError("cannot realize an unfunded project")
    q = project.opportunity.quality
    success = rng.random() < q
    project.outcome = Outcome.SUCCESS if success else Outcome.FAILURE
    project.payoff = (1.0 + tension) if success else -(1.0 + tension)
    return project.outcome


def backpropagate(
    state: OrgState,
    project: Project,
    eta_status: float,
    eta_rep: float,
    normalize: bool,
    eps_floor: float,
) -> None:
    """Credit a resolved project's outcome back along its advocacy chain.

    With r = +1 on success and -1 on failure, the champion's status and
    reputation, the origin->champion edge weight, and the selector's status
    are all scaled by (1 + eta * r); reputations and edge weights are
    clamped to [0, 1].  (Leaving reputations unbounded lets one champion's
    compounding reputation monopolize routing, which merges every origin's
    proposals into a single undifferentiated channel and erases the learned
    structure; the clamp keeps them on the same scale as the relationship
    weights they gate.)  An edge whose weight decays below ``w_min`` severs
    to exactly 0 -- a relationship that keeps failing eventually breaks --
    unless it is the origin's last live edge, which is kept so every input
    agent retains a path to the hidden layer.  Statuses are then floored at
    eps_floor and, when ``normalize`` is set, each layer's status vector is
    rescaled so its sum equals the layer size.  Updates are multiplicative
    so standing compounds with repeated success.
    """
    if project.outcome is Outcome.UNRESOLVED:
        raise ContractViolationError("cannot backpropagate an unresolved outcome")
    r = 1.0 if project.outcome is Outcome.SUCCESS else -1.0
    cfg = state.config
    champion = state.agents[project.champion]
    selector = state.agents[project.selector]
    origin = project.opportunity.origin
    h = project.champion - cfg.n_in

    champion.status = champion.status * (1.0 + eta_status * r)
    selector.status = selector.status * (1.0 + eta_status * r)
    rep = state.graph.rep_hid[h] * (1.0 + eta_rep * r)
    state.graph.rep_hid[h] = min(1.0, max(0.0, rep))
    w = state.graph.w_ih[origin, h] * (1.0 + eta_rep * r)
    w = min(1.0, max(0.0, w))
    row = state.graph.w_ih[origin]
    if w < cfg.w_min and (row > 0.0).sum() > 1:
        w = 0.0
    row[h] = w

    for agent in state.agents:
        if agent.status < eps_floor:
            agent.status = eps_floor
    if normalize:
        for tier in (Tier.INPUT, Tier.HIDDEN, Tier.OUTPUT):
            layer = state.layer_agents(tier)
            scale = len(layer) / math.fsum(a.status for a in layer)
            for agent in layer:
                agent.status = agent.status * scale


def step(state: OrgState, streams: RandomStreams) -> TickRecord:
    """Advance the organization by one tick and return its metric record.

    Stages run in the fixed order generate -> perceive -> advocate ->
    route -> select -> realize -> backpropagate; every funded project is
    resolved and credited within the same tick, in funding order.
    """
    cfg = state.config
    opportunities = generate_opportunities(
        cfg.env, cfg.n_in, streams.environment, start_id=state.next_opportunity_id
    )
    state.next_opportunity_id += len(opportunities)

    projects = []
    for opp in opportunities:
        perceived = perceive(state.agents[opp.origin], opp, cfg.sigma_max, streams.perception)
        projects.append(Project(opportunity=opp, perceived_quality=perceived))

    # Advocacy filter: an input agent only forwards opportunities that look
    # good enough to champion.  This is the channel that lets accurate
    # sensing translate into funded-project success.
    proposals = [p for p in projects if p.perceived_quality >= cfg.proposal_threshold]

    championed = route_proposals(state.graph, proposals, streams.routing)

    champ_statuses = np.array([state.agents[p.champion].status for p in championed])
    output_ids = list(range(cfg.n_in + cfg.n_hid, cfg.n_agents))
    funded = select_projects(
        output_ids, championed, champ_statuses, cfg.budget, cfg.tau, streams.selection
    )

    successes = 0
    for project in funded:
        outcome = realize_outcome(project, cfg.env.tension, streams.outcomes)
        if outcome is Outcome.SUCCESS:
            successes += 1
        backpropagate(state, project, cfg.eta_status, cfg.eta_rep, cfg.normalize, cfg.eps_floor)
    state.funded_log.extend(funded)

    state.tick += 1
    validate_organization(state.agents, state.graph, cfg)
    try:
        rho = spearman(state.input_accuracies, state.graph.w_ih.sum(axis=1))
    except UndefinedResultError:
        rho = float("nan")

    def layer_mean(tier: Tier) -> float:
        layer = state.layer_agents(tier)
        return math.fsum(a.status for a in layer) / len(layer)

    return TickRecord(
        tick=state.tick,
        generated=len(opportunities),
        championed=len(championed),
        funded=len(funded),
        successes=successes,
        mean_status_in=layer_mean(Tier.INPUT),
        mean_status_hid=layer_mean(Tier.HIDDEN),
        mean_status_out=layer_mean(Tier.OUTPUT),
        spearman_acc_weight=rho,
    )


def simulate(
    config: SimConfig, graph: InfluenceGraph | None = None
) -> tuple[OrgState, list[TickRecord]]:
    """Run a full horizon and return both the final state and the tick records."""
    config.validate()
    streams = RandomStreams(config.seed)
    agents, g = new_organization(config, streams, graph)
    state = OrgState(agents=agents, graph=g, config=config)
    records = [step(state, streams) for _ in range(config.env.horizon)]
    return state, records


def run(config: SimConfig, graph: InfluenceGraph | None = None) -> list[TickRecord]:
    """Execute ``horizon`` ticks; deterministic for a fixed (config, seed)."""
    _, records = simulate(config, graph)
    return records
