"""Core domain types for capacity-constrained slot scheduling.

One scheduling period consists of ``m`` slots, each of which can hold at
most ``k`` agents.  Each agent reports a non-negative valuation for every
slot, interpreted as the number of periods she is willing to wait if that
slot is granted.  An allocation gives each agent at most one slot; the
scheduler additionally charges each agent a waiting delay.  An agent's net
payoff is quasi-linear: valuation of the received slot minus the delay.

All types are immutable values after construction and all operations are
pure functions, so everything here is safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Instance",
    "Allocation",
    "Outcome",
    "Violation",
    "payoff",
    "welfare",
    "validate",
]


@dataclass(frozen=True, eq=False)
class Instance:
    """One period's problem: slot count, per-slot capacity, valuations.

    ``valuations`` is an ``n x m`` matrix of non-negative finite floats;
    row ``i`` is agent ``i``'s valuation vector.  Agent identity is
    positional (the row index); stable external identifiers belong to the
    simulation layer, not here.
    """

    m: int
    k: int
    valuations: np.ndarray

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"slot count m must be >= 1, got {self.m}")
        if self.k < 1:
            raise ValueError(f"slot capacity k must be >= 1, got {self.k}")
        values = np.asarray(self.valuations, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != self.m:
            if values.size == 0:
                values = values.reshape(0, self.m)
            else:
                raise ValueError(
                    f"valuations must be an n x {self.m} matrix, got shape {values.shape}"
                )
        if not np.all(np.isfinite(values)):
            raise ValueError("valuations must be finite")
        if values.size and values.min() < 0.0:
            raise ValueError("valuations must be non-negative")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "valuations", values)

    @property
    def n(self) -> int:
        """Number of agents."""
        return self.valuations.shape[0]

    def to_json_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "valuations": self.valuations.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Instance":
        try:
            m = int(data["m"])
            k = int(data["k"])
            rows = data["valuations"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed instance object: {exc}") from exc
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise ValueError("valuations must be a list of rows")
        values = np.array(rows, dtype=np.float64).reshape(len(rows), m if rows else m)
        return cls(m=m, k=k, valuations=values)

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, text: str) -> "Instance":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class Allocation:
    """Per-agent assigned slot index, or ``None`` for unallocated.

    ``None`` is an explicit variant rather than a sentinel slot index:
    the feasibility constraints are "at most one slot per agent", so an
    agent may legitimately receive nothing.
    """

    assignment: tuple[int | None, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(self.assignment))

    @property
    def n(self) -> int:
        return len(self.assignment)

    def slot_loads(self, m: int) -> list[int]:
        """Number of agents assigned to each slot."""
        loads = [0] * m
        for slot in self.assignment:
            if slot is not None:
                loads[slot] += 1
        return loads

    def allocated_agents(self) -> list[int]:
        return [i for i, slot in enumerate(self.assignment) if slot is not None]


@dataclass(frozen=True)
class Outcome:
    """Allocation plus per-agent delays and the total welfare achieved."""

    allocation: Allocation
    delays: tuple[float, ...]
    welfare: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "delays", tuple(float(d) for d in self.delays))
        if len(self.delays) != self.allocation.n:
            raise ValueError("delays length must match the number of agents")
        if any(d < 0.0 for d in self.delays):
            raise ValueError("delays must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "assignment": list(self.allocation.assignment),
            "delays": list(self.delays),
            "welfare": self.welfare,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Outcome":
        try:
            assignment = data["assignment"]
            delays = data["delays"]
            total = float(data["welfare"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed outcome object: {exc}") from exc
        alloc = Allocation(tuple(None if s is None else int(s) for s in assignment))
        return cls(allocation=alloc, delays=tuple(delays), welfare=total)

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, text: str) -> "Outcome":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class Violation:
    """Structured description of a feasibility violation."""

    constraint: str  # "agent", "capacity", or "dimension"
    index: int
    detail: str

    def __str__(self) -> str:
        return f"{self.constraint} constraint violated at index {self.index}: {self.detail}"


def validate(instance: Instance, allocation: Allocation) -> Violation | None:
    """Check both constraint families: agents get at most one slot, slots hold at most k.

    Returns ``None`` when the allocation is feasible for the instance,
    otherwise the first violation found.
    """
    if allocation.n != instance.n:
        return Violation(
            "dimension",
            allocation.n,
            f"allocation covers {allocation.n} agents, instance has {instance.n}",
        )
    for i, slot in enumerate(allocation.assignment):
        if slot is None:
            continue
        if not isinstance(slot, int) or slot < 0 or slot >= instance.m:
            return Violation("agent", i, f"slot index {slot} outside 0..{instance.m - 1}")
    loads = allocation.slot_loads(instance.m)
    for j, load in enumerate(loads):
        if load > instance.k:
            return Violation("capacity", j, f"slot holds {load} agents, capacity is {instance.k}")
    return None


def welfare(instance: Instance, allocation: Allocation) -> float:
    """Sum of allocated valuations, accumulated in agent-index order.

    The fixed summation order makes the value reproducible bit-for-bit,
    which the solver-versus-oracle equality tests rely on.  Infeasible
    allocations are rejected.
    """
    violation = validate(instance, allocation)
    if violation is not None:
        raise ValueError(str(violation))
    total = 0.0
    values = instance.valuations
    for i, slot in enumerate(allocation.assignment):
        if slot is not None:
            total += values[i, slot]
    return total


def payoff(instance: Instance, outcome: Outcome, agent: int) -> float:
    """Quasi-linear payoff of one agent: valuation of the received slot minus delay."""
    n = instance.n
    if not 0 <= agent < n:
        raise IndexError(f"agent index {agent} out of range for {n} agents")
    if outcome.allocation.n != n or len(outcome.delays) != n:
        raise ValueError("outcome dimensions do not match the instance")
    slot = outcome.allocation.assignment[agent]
    value = 0.0 if slot is None else float(instance.valuations[agent, slot])
    result = value - outcome.delays[agent]
    if not math.isfinite(result):
        raise ValueError("payoff is not finite")
    return result


def instance_from_rows(m: int, k: int, rows: Iterable[Sequence[float]]) -> Instance:
    """Convenience constructor from plain Python rows."""
    rows = [list(r) for r in rows]
    values = np.array(rows, dtype=np.float64) if rows else np.zeros((0, m))
    return Instance(m=m, k=k, valuations=values)
