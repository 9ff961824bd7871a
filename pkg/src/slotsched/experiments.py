"""Experiment harness producing the plot data behind each figure as CSV text.

Four experiments: class prioritization profile (allocated preference rank
and delay by urgency class versus population), mispriority of FCFS versus
the VCG scheduler, multi-day congestion reduction on footfall data, and a
mechanism timing sweep.  Every experiment derives all randomness from a
root seed split per (experiment, n, trial), so the emitted CSV bytes are
reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .baselines import ArrivalOrder, fcfs
from .core import Instance
from .mechanism import run_period
from .metrics import URGENCY_LEVELS, class_stats, mispriority, ranks
from .simgen import (
    HOURS_PER_DAY,
    OPEN_HOUR,
    AgentSpec,
    ValuationModel,
    default_footfall_model,
    gen_footfall,
    gen_population,
    ingest_footfall,
    simulate_days,
    valuations_from_spec,
)
from .solver import solve

__all__ = [
    "ExperimentConfig",
    "CLASS_LABELS",
    "run_prioritization",
    "run_mispriority",
    "run_congestion",
    "run_bench",
]

CLASS_LABELS = {1: "not_urgent", 2: "medium", 3: "urgent"}

# Stream labels so each experiment draws from a disjoint part of the root seed.
_STREAM_PRIORITIZATION = 1
_STREAM_MISPRIORITY = 2
_STREAM_CONGESTION = 3
_STREAM_BENCH = 4


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment parameters; see each runner for which fields it reads."""

    m: int = 5
    k: int = 4
    delta: float = 0.65
    n_min: int = 2
    n_max: int | None = None  # defaults to ceil(1.1 * m * k)
    trials_factor: int = 1  # multiplies the 10n trials per population size
    seed: int = 0
    regimes: tuple[str, ...] = ("identical", "random")
    capacities: tuple[int, ...] = (24, 30)
    days: int = 31
    bench_k: int = 12
    bench_m_list: tuple[int, ...] = (2, 4, 6, 8, 10, 12, 14)
    bench_trials: int = 3

    def __post_init__(self) -> None:
        cap = math.ceil(1.1 * self.m * self.k)
        n_max = self.n_max if self.n_max is not None else cap
        object.__setattr__(self, "n_max", n_max)
        if not 2 <= self.n_min <= n_max:
            raise ValueError(f"population range must satisfy 2 <= n_min <= n_max, got [{self.n_min}, {n_max}]")
        if n_max > cap:
            raise ValueError(f"n_max {n_max} exceeds 1.1*m*k = {cap}")
        if self.trials_factor < 1:
            raise ValueError("trials multiplier must be >= 1")
        if self.days < 1:
            raise ValueError("days must be >= 1")
        for regime in self.regimes:
            if regime not in ("identical", "random"):
                raise ValueError(f"unknown preference regime {regime!r}")
        if any(c < 1 for c in self.capacities):
            raise ValueError("capacities must be >= 1")
        if not self.bench_m_list:
            raise ValueError("bench m-list must be non-empty")

    def trials_for(self, n: int) -> int:
        return 10 * n * self.trials_factor

    def population_sizes(self) -> range:
        return range(self.n_min, (self.n_max or 0) + 1)


def _rng(cfg: ExperimentConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, *key])


def _fmt(x: float | int | str | None) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def _instance_for(agents: list[AgentSpec], model: ValuationModel, m: int, k: int) -> Instance:
    rows = (
        np.array([valuations_from_spec(a, model, m) for a in agents])
        if agents
        else np.zeros((0, m))
    )
    return Instance(m=m, k=k, valuations=rows)


def run_prioritization(cfg: ExperimentConfig) -> dict[str, str]:
    """Allocated-rank statistics by urgency class versus population size.

    Emits one rank CSV per preference regime plus a delay CSV for the
    identical regime (the congested case, where the rank/delay trade-off
    shows).  Statistics pool the allocated agents of a class across the
    10n trials of each n; unallocated agents are excluded, which is what
    bends the not-urgent curve down once capacity runs out and denials
    remove its worst-ranked members.
    """
    model = ValuationModel(delta=cfg.delta)
    files: dict[str, str] = {}
    delay_rows: list[list] = []

    for regime_idx, regime in enumerate(cfg.regimes):
        rank_rows: list[list] = []
        for n in cfg.population_sizes():
            pooled_ranks: dict[int, list[int]] = {lvl: [] for lvl in URGENCY_LEVELS}
            pooled_delays: dict[int, list[float]] = {lvl: [] for lvl in URGENCY_LEVELS}
            for trial in range(cfg.trials_for(n)):
                rng = _rng(cfg, _STREAM_PRIORITIZATION, regime_idx, n, trial)
                agents = gen_population(n, cfg.m, regime, rng)
                instance = _instance_for(agents, model, cfg.m, cfg.k)
                outcome = run_period(instance)
                rho = ranks([a.pref_order for a in agents], outcome.allocation)
                for i, agent in enumerate(agents):
                    if outcome.allocation.assignment[i] is not None:
                        pooled_ranks[agent.urgency].append(rho[i])
                        pooled_delays[agent.urgency].append(outcome.delays[i])
            for lvl in URGENCY_LEVELS:
                rs = pooled_ranks[lvl]
                stats = class_stats(rs, pooled_delays[lvl], [lvl] * len(rs))[lvl]
                label = CLASS_LABELS[lvl]
                if stats is None:
                    rank_rows.append([n, label, None, None])
                    if regime == "identical":
                        delay_rows.append([n, label, None])
                else:
                    rank_rows.append([n, label, stats.mean_rank, stats.std_rank])
                    if regime == "identical":
                        delay_rows.append([n, label, stats.mean_delay])
        files[f"prioritization_{regime}.csv"] = _csv(
            ["n", "class", "mean_rank", "std_rank"], rank_rows
        )

    if "identical" in cfg.regimes:
        files["priority_delay.csv"] = _csv(["n", "class", "mean_delay"], delay_rows)
    return files


def run_mispriority(cfg: ExperimentConfig) -> dict[str, str]:
    """Mean mispriority of FCFS versus the VCG scheduler by population size.

    Both run under the class valuation model with identical slot
    preferences (the congested regime the comparison is about); FCFS
    additionally draws a uniform arrival order each trial.  Under
    identical preferences the welfare-optimal allocation serves higher
    classes at least as well as lower ones, so the VCG column is exactly
    zero; FCFS mispriority grows with congestion.
    """
    model = ValuationModel(delta=cfg.delta)
    rows: list[list] = []
    for n in cfg.population_sizes():
        totals = {"fcfs": 0.0, "vcg": 0.0}
        trials = cfg.trials_for(n)
        for trial in range(trials):
            rng = _rng(cfg, _STREAM_MISPRIORITY, n, trial)
            agents = gen_population(n, cfg.m, "identical", rng)
            urg = [a.urgency for a in agents]
            prefs = [a.pref_order for a in agents]
            instance = _instance_for(agents, model, cfg.m, cfg.k)

            order = ArrivalOrder(tuple(int(i) for i in rng.permutation(n)))
            fcfs_out = fcfs(instance, order)
            totals["fcfs"] += mispriority(ranks(prefs, fcfs_out.allocation), urg)

            vcg_alloc = solve(instance)
            totals["vcg"] += mispriority(ranks(prefs, vcg_alloc), urg)
        for mech in ("fcfs", "vcg"):
            rows.append([n, mech, totals[mech] / trials])
    return {"mispriority.csv": _csv(["n", "mechanism", "mean_mispriority"], rows)}


def run_congestion(cfg: ExperimentConfig, footfall_csv: str | None = None) -> dict[str, str]:
    """Hourly occupancy before and after scheduling, per slot capacity.

    Arrivals come from an ingested checkout-timestamp CSV or, by default,
    the calibrated synthetic model over ``cfg.days`` days.  Every capacity
    is simulated on the same arrival trace and the same customer draws.
    ``baseline_mean``/``allocated_mean`` are per-day hourly means over the
    arrival days (the post-horizon flush days only resolve carryover);
    ``dropped_count`` totals the customers dropped after three unallocated
    days, keyed by their arrival hour.
    """
    if footfall_csv is not None:
        _, arrivals = ingest_footfall(footfall_csv.splitlines())
        if not arrivals:
            raise ValueError("footfall source contains no arrivals")
    else:
        arrivals = gen_footfall(
            default_footfall_model(), cfg.days, seed=cfg.seed * 1000 + _STREAM_CONGESTION
        )
    n_days = len(arrivals)
    baseline = np.zeros(HOURS_PER_DAY)
    for day in arrivals:
        for hour in day:
            baseline[hour] += 1
    baseline /= n_days

    model = ValuationModel(delta=cfg.delta)
    rows: list[list] = []
    for capacity in cfg.capacities:
        trace = simulate_days(arrivals, capacity, model, seed=cfg.seed * 1000 + _STREAM_CONGESTION)
        occupancy = np.zeros(HOURS_PER_DAY)
        for day_sim in trace[:n_days]:
            occupancy += day_sim.outcome.allocation.slot_loads(HOURS_PER_DAY)
        occupancy /= n_days

        dropped_by_hour = np.zeros(HOURS_PER_DAY, dtype=np.int64)
        for day_sim in trace:
            by_id = {a.id: a for a in day_sim.agents}
            for agent_id in day_sim.dropped_ids:
                dropped_by_hour[by_id[agent_id].pref_order[0]] += 1

        for hour in range(HOURS_PER_DAY):
            rows.append(
                [
                    capacity,
                    OPEN_HOUR + hour,
                    float(baseline[hour]),
                    float(occupancy[hour]),
                    int(dropped_by_hour[hour]),
                ]
            )
    return {
        "congestion.csv": _csv(
            ["capacity", "hour", "baseline_mean", "allocated_mean", "dropped_count"], rows
        )
    }


def run_bench(cfg: ExperimentConfig) -> dict[str, str]:
    """Wall time of one full mechanism run (allocation plus all n delay solves).

    Populations are n = m*k with random preferences under the class model.
    A small untimed run first warms the compiled kernels so timings
    measure the mechanism, not JIT compilation.
    """
    model = ValuationModel(delta=cfg.delta)
    warm = _instance_for(gen_population(4, 2, "random", _rng(cfg, _STREAM_BENCH, 0, 0)), model, 2, cfg.bench_k)
    run_period(warm)

    rows: list[list] = []
    for m in cfg.bench_m_list:
        n = m * cfg.bench_k
        elapsed = []
        for trial in range(cfg.bench_trials):
            rng = _rng(cfg, _STREAM_BENCH, m, trial)
            agents = gen_population(n, m, "random", rng)
            instance = _instance_for(agents, model, m, cfg.bench_k)
            start = time.perf_counter()
            run_period(instance)
            elapsed.append(time.perf_counter() - start)
        rows.append([m, n, sum(elapsed) / len(elapsed)])
    return {"bench.csv": _csv(["m", "n", "mean_seconds"], rows)}
