"""Evolution of influence structures under an output-layer fitness function.

An organization's layered weights are flattened into a genome and evolved by
a generational genetic algorithm.  Fitness is the mean per-tick payoff of
funded projects over a handful of engine episodes, so it is earned entirely
by output-layer funding decisions, while still reflecting how well the input
and hidden layers feed those decisions.  Every genome in a generation is
scored on the same episode seeds (common random numbers), which keeps
environment luck out of selection pressure; progress is tracked on a fixed
held-out seed set that never influences reproduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import InfluenceGraph, SimConfig
from .engine import simulate
from .errors import CodecError, ConfigurationError, UndefinedResultError
from .metrics import gini
from .rng import RandomStreams

__all__ = [
    "Genome",
    "FitnessReport",
    "GAConfig",
    "GenerationRecord",
    "EvolutionResult",
    "encode",
    "decode",
    "evaluate_fitness",
    "tournament_select",
    "crossover",
    "mutate",
    "evolve",
]

_SEED_BOUND = 2**63


@dataclass
class Genome:
    """Flattened influence weights with a fixed layer-size header.

    Genes are the row-major entries of w_ih followed by w_ho, each in [0, 1].
    """

    n_in: int
    n_hid: int
    n_out: int
    genes: np.ndarray

    @property
    def expected_length(self) -> int:
        return self.n_in * self.n_hid + self.n_hid * self.n_out

    def validate(self) -> None:
        if self.genes.ndim != 1 or len(self.genes) != self.expected_length:
            raise CodecError(
                f"genome length {len(self.genes)} does not match header "
                f"{self.n_in}/{self.n_hid}/{self.n_out} (expected {self.expected_length})"
            )
        if np.any(self.genes < 0.0) or np.any(self.genes > 1.0):
            raise CodecError("genome has genes outside [0, 1]")

    def copy(self) -> "Genome":
        return Genome(self.n_in, self.n_hid, self.n_out, self.genes.copy())


@dataclass
class FitnessReport:
    """Evaluation result: payoff rate, per-agent benefit shares, and their Gini.

    ``gini_defined`` is False when no benefit accrued (e.g. an environment
    that generates no projects), in which case gini is reported as 0.
    """

    fitness: float
    benefit_by_agent: np.ndarray
    gini: float
    gini_defined: bool


@dataclass(frozen=True)
class GAConfig:
    """Genetic-algorithm hyperparameters.

    ``episodes`` is the number of engine episodes per fitness evaluation;
    each generation shares one freshly drawn seed set across all genomes.
    ``lifetime_learning`` keeps within-run status learning active during
    evaluation; disabling it isolates purely structural evolution.
    ``benefit_split`` weights how each funded project's payoff is shared
    among its origin, champion, and selector (normalized internally).
    """

    population: int = 24
    generations: int = 40
    tournament: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float = 0.05
    mutation_scale: float = 0.15
    elitism: int = 2
    episodes: int = 4
    lifetime_learning: bool = True
    benefit_split: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def validate(self) -> None:
        if self.population < 2:
            raise ConfigurationError("population must be >= 2")
        if self.generations < 1:
            raise ConfigurationError("generations must be >= 1")
        if not 1 <= self.tournament <= self.population:
            raise ConfigurationError("tournament must be in [1, population]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigurationError("crossover_rate must be in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigurationError("mutation_rate must be in [0, 1]")
        if self.mutation_scale < 0:
            raise ConfigurationError("mutation_scale must be >= 0")
        if not 0 <= self.elitism < self.population:
            raise ConfigurationError("elitism must be in [0, population)")
        if self.episodes < 1:
            raise ConfigurationError("episodes must be >= 1")
        if min(self.benefit_split) < 0 or sum(self.benefit_split) <= 0:
            raise ConfigurationError("benefit_split needs non-negative weights, positive sum")


@dataclass
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_gini: float
    heldout_best: float


@dataclass
class EvolutionResult:
    records: list[GenerationRecord]
    best_genome: Genome  # genome holding the best held-out fitness seen


def encode(graph: InfluenceGraph) -> Genome:
    """Flatten a graph's weights into a genome (reputations are not inherited)."""
    genes = np.concatenate([graph.w_ih.ravel(), graph.w_ho.ravel()])
    genome = Genome(graph.n_in, graph.n_hid, graph.n_out, genes)
    genome.validate()
    return genome


def decode(genome: Genome) -> InfluenceGraph:
    """Rebuild the weight matrices; reputations reset to 1 (learned in-lifetime)."""
    genome.validate()
    split = genome.n_in * genome.n_hid
    w_ih = genome.genes[:split].reshape(genome.n_in, genome.n_hid).copy()
    w_ho = genome.genes[split:].reshape(genome.n_hid, genome.n_out).copy()
    return InfluenceGraph(w_ih=w_ih, w_ho=w_ho, rep_hid=np.ones(genome.n_hid))


def evaluate_fitness(
    genome: Genome, config: SimConfig, ga: GAConfig, episode_seeds: list[int]
) -> FitnessReport:
    """Score a genome over engine episodes run on the given seeds.

    Fitness is the mean over episodes of (total funded payoff) / horizon.
    Each funded project's payoff is also credited to its origin, champion,
    and selector according to ``benefit_split``; the report carries the
    non-negative clamped per-agent totals and their Gini coefficient.
    """
    if len(episode_seeds) != ga.episodes:
        raise ConfigurationError("episode_seeds length must equal ga.episodes")
    graph = decode(genome)
    if (genome.n_in, genome.n_hid, genome.n_out) != (config.n_in, config.n_hid, config.n_out):
        raise CodecError("genome layer sizes do not match the simulation config")
    sim = config if ga.lifetime_learning else config.with_learning_disabled()
    shares = np.array(ga.benefit_split, dtype=float)
    shares = shares / shares.sum()
    benefit = np.zeros(config.n_agents)
    payoff_rates = []
    for seed in episode_seeds:
        state, _ = simulate(replace(sim, seed=int(seed)), graph)
        total = 0.0
        for project in state.funded_log:
            total += project.payoff
            benefit[project.opportunity.origin] += shares[0] * project.payoff
            benefit[project.champion] += shares[1] * project.payoff
            benefit[project.selector] += shares[2] * project.payoff
        payoff_rates.append(total / sim.env.horizon)
    clamped = np.maximum(benefit, 0.0)
    try:
        g = gini(clamped)
        defined = True
    except UndefinedResultError:
        g, defined = 0.0, False
    return FitnessReport(
        fitness=float(np.mean(payoff_rates)),
        benefit_by_agent=clamped,
        gini=g,
        gini_defined=defined,
    )


def tournament_select(fitnesses: np.ndarray, t: int, rng: np.random.Generator) -> int:
    """Sample t distinct contenders uniformly; the fittest wins, ties to lowest index."""
    if not 1 <= t <= len(fitnesses):
        raise ConfigurationError("tournament size must be in [1, population]")
    contenders = rng.choice(len(fitnesses), size=t, replace=False)
    return int(min(contenders, key=lambda i: (-fitnesses[i], i)))


def crossover(
    a: Genome, b: Genome, pc: float, rng: np.random.Generator
) -> tuple[Genome, Genome]:
    """Uniform crossover with probability pc, otherwise copies of the parents."""
    if len(a.genes) != len(b.genes):
        raise CodecError("cannot cross genomes of different lengths")
    if rng.random() < pc:
        swap = rng.random(len(a.genes)) < 0.5
        child1 = np.where(swap, b.genes, a.genes)
        child2 = np.where(swap, a.genes, b.genes)
        return (
            Genome(a.n_in, a.n_hid, a.n_out, child1),
            Genome(a.n_in, a.n_hid, a.n_out, child2),
        )
    return a.copy(), b.copy()


def mutate(g: Genome, pm: float, sigma_m: float, rng: np.random.Generator) -> Genome:
    """Perturb each gene with probability pm by Normal(0, sigma_m), clamped to [0, 1].

    Always consumes two length-L draws so the evolution stream replays
    identically across mutation-rate settings.
    """
    hit = rng.random(len(g.genes)) < pm
    noise = rng.standard_normal(len(g.genes)) * sigma_m
    genes = np.clip(g.genes + hit * noise, 0.0, 1.0)
    return Genome(g.n_in, g.n_hid, g.n_out, genes)


def evolve(ga: GAConfig, config: SimConfig, master_seed: int) -> EvolutionResult:
    """Run the generational GA and log per-generation progress.

    Draw order from the evolution substream of ``master_seed``: held-out
    episode seeds first, then the initial population's genes, then per
    generation the shared episode seeds followed by reproduction draws.
    ``heldout_best`` is the running best held-out fitness: each generation's
    training-best genome is re-scored on the fixed held-out seeds and the
    maximum so far is logged, so the sequence is non-decreasing by
    construction and rises only when a genuinely better structure appears.
    """
    ga.validate()
    config.validate()
    rng = RandomStreams(master_seed).evolution
    heldout_seeds = [int(s) for s in rng.integers(0, _SEED_BOUND, size=ga.episodes)]
    length = config.n_in * config.n_hid + config.n_hid * config.n_out
    population = [
        Genome(config.n_in, config.n_hid, config.n_out, rng.random(length))
        for _ in range(ga.population)
    ]
    records: list[GenerationRecord] = []
    heldout_best = -np.inf
    best_genome: Genome | None = None
    for generation in range(ga.generations):
        episode_seeds = [int(s) for s in rng.integers(0, _SEED_BOUND, size=ga.episodes)]
        reports = [evaluate_fitness(g, config, ga, episode_seeds) for g in population]
        fitnesses = np.array([r.fitness for r in reports])
        order = sorted(range(ga.population), key=lambda i: (-fitnesses[i], i))
        best = order[0]
        heldout_fit = evaluate_fitness(population[best], config, ga, heldout_seeds).fitness
        if heldout_fit > heldout_best:
            heldout_best = heldout_fit
            best_genome = population[best].copy()
        records.append(
            GenerationRecord(
                generation=generation,
                best_fitness=float(fitnesses[best]),
                mean_fitness=float(fitnesses.mean()),
                best_gini=reports[best].gini,
                heldout_best=float(heldout_best),
            )
        )
        if generation == ga.generations - 1:
            break
        next_population = [population[i].copy() for i in order[: ga.elitism]]
        while len(next_population) < ga.population:
            p1 = tournament_select(fitnesses, ga.tournament, rng)
            p2 = tournament_select(fitnesses, ga.tournament, rng)
            child1, child2 = crossover(population[p1], population[p2], ga.crossover_rate, rng)
            next_population.append(mutate(child1, ga.mutation_rate, ga.mutation_scale, rng))
            if len(next_population) < ga.population:
                next_population.append(mutate(child2, ga.mutation_rate, ga.mutation_scale, rng))
        population = next_population
    assert best_genome is not None
    return EvolutionResult(records=records, best_genome=best_genome)
