"""Batch execution of experiments with bit-stable CSV outputs.

Replications fan out over a thread pool (each worker owns its run
exclusively), results are collected in replication order, and all files are
written by the calling thread, so outputs are byte-identical regardless of
thread count.  Reals are printed with 9 significant digits (round-half-even)
and LF line endings to make determinism a checkable contract.
"""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import emergence as em
from .engine import TickRecord, run
from .errors import EstimationError, IpslError
from .evolution import evolve
from .experiment import ExperimentConfig
from .rng import RandomStreams

__all__ = ["execute", "fmt_real", "final_window_success_rate"]

FINAL_WINDOW_FRACTION = 0.2

TICKS_HEADER = (
    "tick,generated,championed,funded,successes,"
    "mean_status_in,mean_status_hid,mean_status_out,spearman_acc_weight"
)
SUMMARY_HEADER = (
    "seed,ticks,generated,championed,funded,successes,"
    "success_rate,final_success_rate,final_spearman"
)
ABLATION_HEADER = "seed,learning_rate,success_rate_learning,success_rate_control"
POWERLAW_HEADER = "seed,n,m,gamma"
GENERATIONS_HEADER = "generation,best_fitness,mean_fitness,best_gini,heldout_best"


def fmt_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return format(float(x), ".9g")


def _ticks_csv(records: list[TickRecord]) -> str:
    lines = [TICKS_HEADER]
    for r in records:
        lines.append(
            f"{r.tick},{r.generated},{r.championed},{r.funded},{r.successes},"
            f"{fmt_real(r.mean_status_in)},{fmt_real(r.mean_status_hid)},"
            f"{fmt_real(r.mean_status_out)},{fmt_real(r.spearman_acc_weight)}"
        )
    return "\n".join(lines) + "\n"


def final_window_success_rate(records: list[TickRecord]) -> float:
    """Success rate of funded projects over the final 20% of ticks (0 if none)."""
    start = int(math.floor(len(records) * (1.0 - FINAL_WINDOW_FRACTION)))
    window = records[start:]
    funded = sum(r.funded for r in window)
    if funded == 0:
        return 0.0
    return sum(r.successes for r in window) / funded


def _success_rate(records: list[TickRecord]) -> float:
    funded = sum(r.funded for r in records)
    return (sum(r.successes for r in records) / funded) if funded else 0.0


class _OutputSet:
    """Collects file payloads, then writes them all; removes them on failure."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.pending: list[tuple[Path, str]] = []
        self.written: list[Path] = []

    def add(self, name: str, text: str) -> None:
        self.pending.append((self.out_dir / name, text))

    def flush(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        for path, text in self.pending:
            path.write_text(text, newline="\n")
            self.written.append(path)

    def cleanup(self) -> None:
        for path in self.written:
            try:
                path.unlink()
            except OSError:
                pass


def _map_replications(config: ExperimentConfig, job):
    seeds = config.replication_seeds()
    threads = config.threads if config.threads > 0 else (os.cpu_count() or 1)
    if threads == 1 or len(seeds) == 1:
        return [job(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, seeds))


def _mode_run(config: ExperimentConfig, outputs: _OutputSet) -> None:
    def job(seed: int) -> list[TickRecord]:
        return run(replace(config.sim, seed=seed))

    results = _map_replications(config, job)
    summary = [SUMMARY_HEADER]
    for seed, records in zip(config.replication_seeds(), results):
        outputs.add(f"ticks_{seed}.csv", _ticks_csv(records))
        summary.append(
            f"{seed},{len(records)},"
            f"{sum(r.generated for r in records)},{sum(r.championed for r in records)},"
            f"{sum(r.funded for r in records)},{sum(r.successes for r in records)},"
            f"{fmt_real(_success_rate(records))},"
            f"{fmt_real(final_window_success_rate(records))},"
            f"{fmt_real(records[-1].spearman_acc_weight)}"
        )
    outputs.add("summary.csv", "\n".join(summary) + "\n")


def _mode_ablate(config: ExperimentConfig, outputs: _OutputSet) -> None:
    def job(seed: int) -> tuple[float, float]:
        learning = run(replace(config.sim, seed=seed))
        control = run(replace(config.sim.with_learning_disabled(), seed=seed))
        return final_window_success_rate(learning), final_window_success_rate(control)

    results = _map_replications(config, job)
    lines = [ABLATION_HEADER]
    for seed, (with_learning, without) in zip(config.replication_seeds(), results):
        lines.append(
            f"{seed},{fmt_real(config.sim.eta_status)},"
            f"{fmt_real(with_learning)},{fmt_real(without)}"
        )
    outputs.add("ablation.csv", "\n".join(lines) + "\n")


def _mode_emerge(config: ExperimentConfig, outputs: _OutputSet) -> None:
    params = config.emergence

    def job(seed: int):
        rng = RandomStreams(seed).environment
        graph = em.grow_network(params.n, params.m, rng)
        tiers = em.assign_tiers(graph, params.f_out, params.f_in)
        try:
            gamma = em.fit_power_law(em.degree_distribution(graph), params.effective_k_min)
        except EstimationError:
            gamma = float("nan")  # reported as unavailable
        return graph, tiers, gamma

    results = _map_replications(config, job)
    powerlaw = [POWERLAW_HEADER]
    for seed, (graph, tiers, gamma) in zip(config.replication_seeds(), results):
        edge_lines = [f"# nodes={graph.n}"]
        edge_lines += [
            f"{u} {v}" for u, v in sorted((min(u, v), max(u, v)) for u, v in graph.edges)
        ]
        outputs.add(f"edges_{seed}.txt", "\n".join(edge_lines) + "\n")
        tier_lines = ["node_id,tier"]
        tier_lines += [f"{node},{tiers.tiers[node].value}" for node in sorted(tiers.tiers)]
        outputs.add(f"tiers_{seed}.csv", "\n".join(tier_lines) + "\n")
        powerlaw.append(f"{seed},{params.n},{params.m},{fmt_real(gamma)}")
    outputs.add("powerlaw.csv", "\n".join(powerlaw) + "\n")


def _mode_evolve(config: ExperimentConfig, outputs: _OutputSet) -> None:
    def job(seed: int):
        return evolve(config.ga, config.sim, master_seed=seed)

    results = _map_replications(config, job)
    single = config.replications == 1
    for seed, result in zip(config.replication_seeds(), results):
        lines = [GENERATIONS_HEADER]
        for r in result.records:
            lines.append(
                f"{r.generation},{fmt_real(r.best_fitness)},{fmt_real(r.mean_fitness)},"
                f"{fmt_real(r.best_gini)},{fmt_real(r.heldout_best)}"
            )
        genome = result.best_genome
        genome_lines = [
            f"{genome.n_in},{genome.n_hid},{genome.n_out}",
            ",".join(fmt_real(g) for g in genome.genes),
        ]
        gen_name = "generations.csv" if single else f"generations_{seed}.csv"
        dump_name = "best_genome.csv" if single else f"best_genome_{seed}.csv"
        outputs.add(gen_name, "\n".join(lines) + "\n")
        outputs.add(dump_name, "\n".join(genome_lines) + "\n")


_MODE_HANDLERS = {
    "run": _mode_run,
    "ablate": _mode_ablate,
    "emerge": _mode_emerge,
    "evolve": _mode_evolve,
}


def execute(config: ExperimentConfig) -> int:
    """Run one experiment config; returns a process exit code.

    All file payloads are computed before anything is written; on any
    failure the files written so far are removed, so a nonzero exit never
    leaves partial outputs behind.
    """
    outputs = _OutputSet(Path(config.out_dir))
    try:
        config.validate()
        _MODE_HANDLERS[config.mode](config, outputs)
        outputs.flush()
    except (IpslError, OSError) as exc:
        outputs.cleanup()
        print(f"ipsl: error: {exc}", file=sys.stderr)
        return 1
    return 0
