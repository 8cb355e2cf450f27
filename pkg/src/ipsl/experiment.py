"""Experiment configuration: flat sectioned `key = value` files.

Every parameter in this artifact is a scalar, so the config format is a flat
list of `key = value` lines under `[section]` headers (sections: experiment,
org, env, learning, emergence, ga).  Keys before any header belong to
[experiment].  Full-line `#` comments and blank lines are allowed.  Unknown
sections and keys are hard errors with line numbers, so typos cannot
silently fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import EnvParams, SimConfig
from .errors import ConfigurationError
from .evolution import GAConfig

__all__ = ["EmergenceParams", "ExperimentConfig", "parse_config", "DEFAULT_SECTIONS"]

MODES = ("run", "emerge", "evolve", "ablate")


@dataclass(frozen=True)
class EmergenceParams:
    """Network-growth parameters: size, edges per arrival, tier fractions."""

    n: int = 1000
    m: int = 2
    f_out: float = 0.1
    f_in: float = 0.5
    k_min: int = 0  # 0 means "use m"

    def validate(self) -> None:
        if self.m < 1:
            raise ConfigurationError("m must be >= 1")
        if self.n <= self.m:
            raise ConfigurationError("n must be > m")
        if not (0.0 < self.f_out < 1.0 and 0.0 < self.f_in < 1.0):
            raise ConfigurationError("f_out and f_in must be in (0, 1)")
        if self.f_out + self.f_in >= 1.0:
            raise ConfigurationError("f_out + f_in must be < 1")
        if self.k_min < 0:
            raise ConfigurationError("k_min must be >= 0")

    @property
    def effective_k_min(self) -> int:
        return self.k_min if self.k_min > 0 else self.m


@dataclass
class ExperimentConfig:
    """A fully resolved batch experiment: mode, replication plan, parameters."""

    mode: str
    replications: int = 1
    out_dir: str = "out"
    master_seed: int = 1
    threads: int = 0  # 0 means "available parallelism"
    sim: SimConfig = field(default_factory=SimConfig)
    ga: GAConfig = field(default_factory=GAConfig)
    emergence: EmergenceParams = field(default_factory=EmergenceParams)

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {', '.join(MODES)}")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if self.threads < 0:
            raise ConfigurationError("threads must be >= 0")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        self.sim.validate()
        self.ga.validate()
        self.emergence.validate()

    def replication_seeds(self) -> list[int]:
        return [self.master_seed + i for i in range(self.replications)]


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    raise ValueError(f"expected true or false, got {raw!r}")


# section -> key -> (parser, default). Defaults live here so a minimal config
# of just `mode = run` resolves completely.
DEFAULT_SECTIONS: dict[str, dict[str, tuple]] = {
    "experiment": {
        "mode": (str, None),
        "replications": (int, 1),
        "out": (str, "out"),
        "seed": (int, 1),
        "threads": (int, 0),
    },
    "org": {
        "n_in": (int, 6),
        "n_hid": (int, 8),
        "n_out": (int, 2),
    },
    "env": {
        "arrival_rate": (float, 6.0),
        "quality_alpha": (float, 1.0),
        "quality_beta": (float, 1.0),
        "tension": (float, 0.0),
        "horizon": (int, 500),
    },
    "learning": {
        "budget": (int, 2),
        "tau": (float, 0.5),
        "eta_status": (float, 0.2),
        "eta_rep": (float, 0.2),
        "normalize": (_parse_bool, True),
        "sigma_max": (float, 1.0),
        "proposal_threshold": (float, 0.55),
        "w_min": (float, 0.3),
        "eps_floor": (float, 1e-6),
    },
    "emergence": {
        "n": (int, 1000),
        "m": (int, 2),
        "f_out": (float, 0.1),
        "f_in": (float, 0.5),
        "k_min": (int, 0),
    },
    "ga": {
        "population": (int, 24),
        "generations": (int, 40),
        "tournament": (int, 3),
        "crossover_rate": (float, 0.9),
        "mutation_rate": (float, 0.05),
        "mutation_scale": (float, 0.15),
        "elitism": (int, 2),
        "episodes": (int, 4),
        "lifetime_learning": (_parse_bool, True),
        "benefit_origin": (float, 1.0),
        "benefit_champion": (float, 1.0),
        "benefit_selector": (float, 1.0),
    },
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate an experiment config; unknown keys are hard errors."""
    values: dict[str, dict[str, object]] = {s: {} for s in DEFAULT_SECTIONS}
    section = "experiment"
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in DEFAULT_SECTIONS:
                raise ConfigurationError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in DEFAULT_SECTIONS[section]:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r} in [{section}]")
        parser, _ = DEFAULT_SECTIONS[section][key]
        try:
            values[section][key] = parser(raw_value)
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: bad value for {key!r}: {exc}") from None

    resolved: dict[str, dict[str, object]] = {}
    for sec, keys in DEFAULT_SECTIONS.items():
        resolved[sec] = {}
        for key, (_, default) in keys.items():
            resolved[sec][key] = values[sec].get(key, default)
    if resolved["experiment"]["mode"] is None:
        raise ConfigurationError("mode is required (run, emerge, evolve or ablate)")

    env = EnvParams(
        arrival_rate=resolved["env"]["arrival_rate"],
        quality_alpha=resolved["env"]["quality_alpha"],
        quality_beta=resolved["env"]["quality_beta"],
        tension=resolved["env"]["tension"],
        horizon=resolved["env"]["horizon"],
    )
    sim = SimConfig(
        n_in=resolved["org"]["n_in"],
        n_hid=resolved["org"]["n_hid"],
        n_out=resolved["org"]["n_out"],
        budget=resolved["learning"]["budget"],
        tau=resolved["learning"]["tau"],
        eta_status=resolved["learning"]["eta_status"],
        eta_rep=resolved["learning"]["eta_rep"],
        normalize=resolved["learning"]["normalize"],
        sigma_max=resolved["learning"]["sigma_max"],
        proposal_threshold=resolved["learning"]["proposal_threshold"],
        w_min=resolved["learning"]["w_min"],
        eps_floor=resolved["learning"]["eps_floor"],
        env=env,
        seed=resolved["experiment"]["seed"],
    )
    ga = GAConfig(
        population=resolved["ga"]["population"],
        generations=resolved["ga"]["generations"],
        tournament=resolved["ga"]["tournament"],
        crossover_rate=resolved["ga"]["crossover_rate"],
        mutation_rate=resolved["ga"]["mutation_rate"],
        mutation_scale=resolved["ga"]["mutation_scale"],
        elitism=resolved["ga"]["elitism"],
        episodes=resolved["ga"]["episodes"],
        lifetime_learning=resolved["ga"]["lifetime_learning"],
        benefit_split=(
            resolved["ga"]["benefit_origin"],
            resolved["ga"]["benefit_champion"],
            resolved["ga"]["benefit_selector"],
        ),
    )
    emergence = EmergenceParams(
        n=resolved["emergence"]["n"],
        m=resolved["emergence"]["m"],
        f_out=resolved["emergence"]["f_out"],
        f_in=resolved["emergence"]["f_in"],
        k_min=resolved["emergence"]["k_min"],
    )
    config = ExperimentConfig(
        mode=resolved["experiment"]["mode"],
        replications=resolved["experiment"]["replications"],
        out_dir=resolved["experiment"]["out"],
        master_seed=resolved["experiment"]["seed"],
        threads=resolved["experiment"]["threads"],
        sim=sim,
        ga=ga,
        emergence=emergence,
    )
    config.validate()
    return config
