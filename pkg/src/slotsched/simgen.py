"""Experiment instance generation and the multi-day congestion simulator.

Valuations follow a three-class urgency model: an agent of class c
(not-urgent=1, medium=2, urgent=3) values her t-th most preferred slot at
c * delta^(t-1) for a decay factor delta in (0, 1).

The footfall model covers a store day of 14 hourly slots from 7AM to 9PM.
Customers arrive per hour as independent Poisson counts; the default
hourly means are calibrated so the 5-6PM, 6-7PM, and 7-8PM hours average
38.00, 48.63, and 52.83 with an overall hourly mean of 26.5.

The day simulator schedules each day's pool (carryover plus new arrivals)
with the VCG mechanism.  Unallocated customers return the next day with
urgency escalated one level and the same slot preferences; after three
unallocated days they are dropped (handled out of band, e.g. delivery).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import Instance, Outcome
from .mechanism import MechanismConfig, run_period

__all__ = [
    "OPEN_HOUR",
    "HOURS_PER_DAY",
    "ValuationModel",
    "AgentSpec",
    "FootfallModel",
    "DaySim",
    "valuations_from_spec",
    "gen_population",
    "default_footfall_model",
    "gen_footfall",
    "ingest_footfall",
    "footfall_to_timestamps",
    "proximity_pref_order",
    "simulate_days",
    "trace_to_json_dict",
]

OPEN_HOUR = 7
HOURS_PER_DAY = 14  # hourly slots 7AM .. 9PM
MAX_WAIT_DAYS = 3

# Calibration anchors for the default footfall profile (rush hours 5-8PM).
_RUSH_MEANS = {10: 38.00, 11: 48.63, 12: 52.83}
_OVERALL_HOURLY_MEAN = 26.5


@dataclass(frozen=True)
class ValuationModel:
    """Class-based valuation model: value of the t-th preference is class_value * delta^(t-1)."""

    delta: float = 0.65
    class_values: tuple[float, float, float] = (1.0, 2.0, 3.0)  # not-urgent, medium, urgent

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    def value_for(self, urgency: int, preference_rank: int) -> float:
        """Valuation of the slot at 1-based preference rank for an urgency class."""
        return self.class_values[urgency - 1] * self.delta ** (preference_rank - 1)


@dataclass(frozen=True)
class AgentSpec:
    """A simulated customer: stable id, urgency class, slot preference order."""

    id: str
    urgency: int
    pref_order: tuple[int, ...]
    days_waiting: int = 0

    def __post_init__(self) -> None:
        if self.urgency not in (1, 2, 3):
            raise ValueError(f"urgency must be 1, 2, or 3, got {self.urgency}")
        if sorted(self.pref_order) != list(range(len(self.pref_order))):
            raise ValueError("pref_order must be a permutation of the slots")
        if not 0 <= self.days_waiting <= MAX_WAIT_DAYS:
            raise ValueError(f"days_waiting must be in 0..{MAX_WAIT_DAYS}")


def valuations_from_spec(spec: AgentSpec, model: ValuationModel, m: int) -> np.ndarray:
    """Valuation row of one agent over m slots."""
    if len(spec.pref_order) != m:
        raise ValueError(f"pref_order has {len(spec.pref_order)} slots, expected {m}")
    row = np.empty(m, dtype=np.float64)
    for t, slot in enumerate(spec.pref_order):
        row[slot] = model.value_for(spec.urgency, t + 1)
    return row


def gen_population(
    n: int,
    m: int,
    regime: str,
    seed: int | np.random.Generator,
) -> list[AgentSpec]:
    """Draw n agents with uniform urgencies and preferences per regime.

    ``regime`` is "identical" (everyone prefers slots in index order) or
    "random" (independent uniform permutations).  Deterministic given the
    seed.
    """
    if regime not in ("identical", "random"):
        raise ValueError(f"unknown preference regime {regime!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    agents = []
    for i in range(n):
        urgency = int(rng.integers(1, 4))
        if regime == "identical":
            prefs = tuple(range(m))
        else:
            prefs = tuple(int(s) for s in rng.permutation(m))
        agents.append(AgentSpec(id=f"a{i}", urgency=urgency, pref_order=prefs))
    return agents


@dataclass(frozen=True)
class FootfallModel:
    """Hourly Poisson arrival means for the 14 store hours."""

    hourly_means: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.hourly_means) != HOURS_PER_DAY:
            raise ValueError(f"need {HOURS_PER_DAY} hourly means")
        if any(x < 0 for x in self.hourly_means):
            raise ValueError("hourly means must be non-negative")


def default_footfall_model() -> FootfallModel:
    """Calibrated synthetic footfall profile.

    The three rush hours are pinned to the published monthly averages;
    the remaining 11 hours follow a mild morning ramp (12 up to 30 across
    7AM-5PM, with a 20-weight tail hour after the rush), rescaled so the
    overall hourly mean is 26.5.  The ramp shape is a documented free
    parameter: only the four anchor statistics are constrained.
    """
    means = np.zeros(HOURS_PER_DAY)
    for idx, mean in _RUSH_MEANS.items():
        means[idx] = mean
    ramp = np.linspace(12.0, 30.0, 10)  # hours 0..9 (7AM..5PM)
    tail = 20.0  # hour 13 (8-9PM)
    free_total = _OVERALL_HOURLY_MEAN * HOURS_PER_DAY - sum(_RUSH_MEANS.values())
    scale = free_total / (ramp.sum() + tail)
    means[0:10] = ramp * scale
    means[13] = tail * scale
    return FootfallModel(hourly_means=tuple(means))


def gen_footfall(
    model: FootfallModel,
    days: int,
    seed: int,
) -> list[list[int]]:
    """Per-day arrival lists: each entry is the arrival hour index (0..13) of one customer.

    Hourly counts are independent Poisson draws with the model's means.
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    rng = np.random.default_rng(seed)
    out: list[list[int]] = []
    for _ in range(days):
        day: list[int] = []
        for hour, mean in enumerate(model.hourly_means):
            count = int(rng.poisson(mean)) if mean > 0 else 0
            day.extend([hour] * count)
        out.append(day)
    return out


def footfall_to_timestamps(arrivals: Sequence[Sequence[int]], start: dt.date) -> list[str]:
    """Render arrival lists as ISO-8601 checkout timestamps, one per customer."""
    lines = []
    for day_idx, day in enumerate(arrivals):
        date = start + dt.timedelta(days=day_idx)
        for hour in day:
            ts = dt.datetime.combine(date, dt.time(hour=OPEN_HOUR + hour, minute=30))
            lines.append(ts.isoformat())
    return lines


def ingest_footfall(source: str | Path | Iterable[str]) -> tuple[FootfallModel, list[list[int]]]:
    """Parse a checkout-timestamp CSV into a footfall model and arrival lists.

    One ISO-8601 timestamp per line; an optional non-timestamp header line
    is skipped.  Timestamps must fall within opening hours (7AM-9PM).
    Days are the full span from the earliest to the latest date seen;
    hourly means are empirical means over that span.  An empty file gives
    an all-zero model.
    """
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text().splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]

    stamps: list[dt.datetime] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            ts = dt.datetime.fromisoformat(text)
        except ValueError:
            if lineno == 1:
                continue  # header line
            raise ValueError(f"line {lineno}: malformed timestamp {text!r}") from None
        if not OPEN_HOUR <= ts.hour < OPEN_HOUR + HOURS_PER_DAY:
            raise ValueError(
                f"line {lineno}: timestamp {text!r} outside opening hours 7AM-9PM"
            )
        stamps.append(ts)

    if not stamps:
        return FootfallModel(hourly_means=(0.0,) * HOURS_PER_DAY), []

    first = min(s.date() for s in stamps)
    last = max(s.date() for s in stamps)
    span = (last - first).days + 1
    per_day: list[list[int]] = [[] for _ in range(span)]
    totals = np.zeros(HOURS_PER_DAY)
    for ts in stamps:
        day_idx = (ts.date() - first).days
        hour_idx = ts.hour - OPEN_HOUR
        per_day[day_idx].append(hour_idx)
        totals[hour_idx] += 1
    for day in per_day:
        day.sort()
    means = tuple(totals / span)
    return FootfallModel(hourly_means=means), per_day


def proximity_pref_order(arrival_hour: int, m: int = HOURS_PER_DAY) -> tuple[int, ...]:
    """Slot preference order of a customer arriving in a given hour.

    Most preferred is the arrival hour itself, then slots by absolute
    hour distance with ties broken toward the later hour.
    """
    if not 0 <= arrival_hour < m:
        raise ValueError(f"arrival hour {arrival_hour} outside 0..{m - 1}")
    return tuple(sorted(range(m), key=lambda h: (abs(h - arrival_hour), -h)))


@dataclass(frozen=True)
class DaySim:
    """One simulated day: the pool, the outcome, and who carried over or dropped."""

    day: int
    agents: tuple[AgentSpec, ...]
    outcome: Outcome
    carryover_ids: tuple[str, ...]
    dropped_ids: tuple[str, ...]


def _escalated(agent: AgentSpec) -> AgentSpec:
    return replace(
        agent,
        urgency=min(agent.urgency + 1, 3),
        days_waiting=agent.days_waiting + 1,
    )


def simulate_days(
    arrivals: Sequence[Sequence[int]],
    k: int,
    model: ValuationModel,
    seed: int,
    *,
    m: int = HOURS_PER_DAY,
    flush: bool = True,
    revise_prefs: Callable[[AgentSpec], tuple[int, ...]] | None = None,
) -> list[DaySim]:
    """Run the periodic mechanism over a sequence of arrival days.

    Each day's instance is the carryover pool followed by the day's new
    arrivals (urgency drawn uniformly, preference by hour proximity).
    Allocated customers leave; unallocated ones return the next day with
    urgency one level higher and, by default, unchanged preferences
    (``revise_prefs`` can override).  A customer unallocated on three
    consecutive days is dropped.  With ``flush`` the simulation keeps
    running arrival-free days until the pool empties, so every customer
    ends either allocated or dropped.  Deterministic given the seed.
    """
    if k < 1:
        raise ValueError("capacity k must be >= 1")
    rng = np.random.default_rng(seed)
    pool: list[AgentSpec] = []
    days_out: list[DaySim] = []
    total_days = len(arrivals)

    day = 0
    while True:
        if day < total_days:
            new_agents = [
                AgentSpec(
                    id=f"d{day:03d}-{i:04d}",
                    urgency=int(rng.integers(1, 4)),
                    pref_order=proximity_pref_order(hour, m),
                )
                for i, hour in enumerate(arrivals[day])
            ]
        elif flush and pool:
            new_agents = []
        else:
            break

        agents = tuple(pool + new_agents)
        values = (
            np.array([valuations_from_spec(a, model, m) for a in agents])
            if agents
            else np.zeros((0, m))
        )
        instance = Instance(m=m, k=k, valuations=values)
        outcome = run_period(instance, MechanismConfig())

        carryover: list[AgentSpec] = []
        dropped: list[str] = []
        for agent, slot in zip(agents, outcome.allocation.assignment):
            if slot is not None:
                continue
            waited = _escalated(agent)
            if waited.days_waiting >= MAX_WAIT_DAYS:
                dropped.append(agent.id)
            elif revise_prefs is None:
                carryover.append(waited)
            else:
                carryover.append(replace(waited, pref_order=revise_prefs(waited)))

        days_out.append(
            DaySim(
                day=day,
                agents=agents,
                outcome=outcome,
                carryover_ids=tuple(a.id for a in carryover),
                dropped_ids=tuple(dropped),
            )
        )
        pool = carryover
        day += 1

    return days_out


def trace_to_json_dict(days: Sequence[DaySim]) -> list[dict]:
    """Serializable per-day trace: instance summary, assignment, delays, carryover, dropped."""
    trace = []
    for d in days:
        trace.append(
            {
                "day": d.day,
                "agents": [
                    {
                        "id": a.id,
                        "urgency": a.urgency,
                        "days_waiting": a.days_waiting,
                        "top_slot": a.pref_order[0] if a.pref_order else None,
                    }
                    for a in d.agents
                ],
                "assignment": list(d.outcome.allocation.assignment),
                "delays": list(d.outcome.delays),
                "welfare": d.outcome.welfare,
                "carryover_ids": list(d.carryover_ids),
                "dropped_ids": list(d.dropped_ids),
            }
        )
    return trace
