"""Comparison schedulers: first-come-first-served and sorted-urgency dictator.

Neither baseline charges delays; they exist to quantify what the VCG
scheduler buys.  FCFS models today's booking apps: whoever arrives first
books their favorite available slot.  The sequential dictator serves
agents in decreasing order of a scalar urgency, each booking their best
remaining slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import Instance, Allocation, Outcome, welfare

__all__ = ["ArrivalOrder", "fcfs", "sequential_dictator"]


@dataclass(frozen=True)
class ArrivalOrder:
    """A permutation of agent indices giving the order of arrival."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("arrival order must be a permutation of 0..n-1")


def _best_open_slot(values, loads, k: int, *, skip_zero: bool) -> int | None:
    """Highest-valued slot with remaining capacity; ties go to the lower index."""
    best_slot = None
    best_value = 0.0
    for j, v in enumerate(values):
        if loads[j] >= k:
            continue
        if skip_zero and v <= 0.0:
            continue
        if best_slot is None or v > best_value:
            best_slot = j
            best_value = float(v)
    return best_slot


def fcfs(instance: Instance, order: ArrivalOrder) -> Outcome:
    """First-come-first-served booking.

    Agents are processed in arrival order and take their highest-valued
    slot that still has capacity.  An agent books nothing rather than a
    zero-valued slot: her payoff is zero either way and a zero-value
    booking would only block later arrivals.  No delays are charged.
    """
    if len(order.order) != instance.n:
        raise ValueError("arrival order length must equal the number of agents")
    assignment: list[int | None] = [None] * instance.n
    loads = [0] * instance.m
    for i in order.order:
        slot = _best_open_slot(instance.valuations[i], loads, instance.k, skip_zero=True)
        if slot is not None:
            assignment[i] = slot
            loads[slot] += 1
    allocation = Allocation(tuple(assignment))
    return Outcome(
        allocation=allocation,
        delays=(0.0,) * instance.n,
        welfare=welfare(instance, allocation),
    )


def sequential_dictator(instance: Instance, urgencies: Sequence[float]) -> Outcome:
    """Sorted-urgency sequential dictator.

    Agents are served in decreasing urgency (ties by agent index) and each
    books their highest-valued remaining slot, even a zero-valued one --
    the dictator protocol always hands out a slot while capacity remains.
    No delays are charged.
    """
    if len(urgencies) != instance.n:
        raise ValueError("urgencies length must equal the number of agents")
    serve_order = sorted(range(instance.n), key=lambda i: (-float(urgencies[i]), i))
    assignment: list[int | None] = [None] * instance.n
    loads = [0] * instance.m
    for i in serve_order:
        slot = _best_open_slot(instance.valuations[i], loads, instance.k, skip_zero=False)
        if slot is not None:
            assignment[i] = slot
            loads[slot] += 1
    allocation = Allocation(tuple(assignment))
    return Outcome(
        allocation=allocation,
        delays=(0.0,) * instance.n,
        welfare=welfare(instance, allocation),
    )
