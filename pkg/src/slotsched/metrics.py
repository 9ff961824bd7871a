"""Evaluation metrics: preference ranks, mispriority, occupancy, class statistics.

The mispriority score penalizes allocations in which a more urgent agent
ends up with a worse-ranked slot than a less urgent one: every such
ordered pair contributes the rank gap plus the urgency gap.  A scheduler
that always serves higher urgency at least as well scores exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Allocation

__all__ = ["ClassStats", "ranks", "mispriority", "congestion_profile", "class_stats"]

URGENCY_LEVELS = (1, 2, 3)


def ranks(pref_orders: Sequence[Sequence[int]], allocation: Allocation) -> list[int]:
    """Preference rank of each agent's assigned slot (1 = most preferred).

    ``pref_orders[i]`` lists agent i's slots from most to least preferred
    and must be a permutation of all slots.  Unallocated agents get rank
    m + 1, one worse than any actual slot.
    """
    if len(pref_orders) != allocation.n:
        raise ValueError("need one preference order per agent")
    out: list[int] = []
    for i, slot in enumerate(allocation.assignment):
        order = list(pref_orders[i])
        m = len(order)
        if sorted(order) != list(range(m)):
            raise ValueError(f"preference order of agent {i} is not a permutation of slots")
        out.append(m + 1 if slot is None else order.index(slot) + 1)
    return out


def mispriority(rho: Sequence[int], urg: Sequence[int]) -> float:
    """Total weighted count of urgency inversions in an allocation.

    Sums, over ordered pairs (i, j) with rank(j) > rank(i) and
    urgency(j) > urgency(i), the quantity
    (rank(j) - rank(i)) + (urgency(j) - urgency(i)).
    """
    if len(rho) != len(urg):
        raise ValueError("rank and urgency profiles must have equal length")
    r = np.asarray(rho, dtype=np.float64)
    u = np.asarray(urg, dtype=np.float64)
    rank_gap = r[None, :] - r[:, None]
    urg_gap = u[None, :] - u[:, None]
    fires = (rank_gap > 0) & (urg_gap > 0)
    return float(np.sum((rank_gap + urg_gap)[fires]))


def congestion_profile(day_allocations: Sequence[Allocation], m: int) -> list[float]:
    """Mean number of allocated agents per slot across days."""
    if not day_allocations:
        return [0.0] * m
    totals = np.zeros(m)
    for alloc in day_allocations:
        loads = alloc.slot_loads(m)
        if len(loads) != m:
            raise ValueError("inconsistent slot count across days")
        totals += loads
    return list(totals / len(day_allocations))


@dataclass(frozen=True)
class ClassStats:
    """Per-urgency-class summary; ``std`` fields are None for single samples."""

    count: int
    mean_rank: float
    std_rank: float | None
    mean_delay: float
    std_delay: float | None


def _mean_std(xs: list[float]) -> tuple[float, float | None]:
    mean = sum(xs) / len(xs)
    if len(xs) < 2:
        return mean, None
    var = sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)
    return mean, var**0.5


def class_stats(
    rho: Sequence[int],
    delays: Sequence[float],
    urg: Sequence[int],
) -> dict[int, ClassStats | None]:
    """Group ranks and delays by urgency class (1, 2, 3).

    Uses the sample (n-1) standard deviation.  A class with no members
    maps to None rather than producing NaNs.
    """
    if not (len(rho) == len(delays) == len(urg)):
        raise ValueError("rank, delay, and urgency profiles must have equal length")
    out: dict[int, ClassStats | None] = {}
    for level in URGENCY_LEVELS:
        level_ranks = [float(r) for r, u in zip(rho, urg) if u == level]
        level_delays = [float(d) for d, u in zip(delays, urg) if u == level]
        if not level_ranks:
            out[level] = None
            continue
        mean_rank, std_rank = _mean_std(level_ranks)
        mean_delay, std_delay = _mean_std(level_delays)
        out[level] = ClassStats(
            count=len(level_ranks),
            mean_rank=mean_rank,
            std_rank=std_rank,
            mean_delay=mean_delay,
            std_delay=std_delay,
        )
    return out
