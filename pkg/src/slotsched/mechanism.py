"""The per-period scheduling mechanism: optimal allocation plus VCG delays.

Each period the mechanism computes a welfare-maximizing allocation of
agents to capacity-constrained slots, then charges every agent a waiting
delay equal to the externality she imposes on the others (the Clarke
pivot rule): the welfare the others would get without her, minus the
welfare the others get with her present.  Delays priced this way make
truthful reporting a dominant strategy and participation individually
rational; both properties are exercised by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Allocation, Instance, Outcome, welfare
from .oracle import solve_exact
from .solver import solve, solve_excluding

__all__ = ["MechanismConfig", "MechanismInvariantError", "run_period", "delay_for_agent"]

# Raw delays are mathematically non-negative; anything below this is a bug.
_DELAY_FLOOR = -1e-9


class MechanismInvariantError(RuntimeError):
    """A mechanism-level invariant failed (indicates a solver defect)."""


@dataclass(frozen=True)
class MechanismConfig:
    """Mechanism options.  ``use_oracle`` swaps in the exhaustive solver (testing only)."""

    use_oracle: bool = False


def _solve_full(instance: Instance, use_oracle: bool) -> Allocation:
    if use_oracle:
        allocation, _ = solve_exact(instance)
        return allocation
    return solve(instance)


def _solve_without(instance: Instance, excluded: int, use_oracle: bool) -> Allocation:
    if not use_oracle:
        return solve_excluding(instance, excluded)
    sub_values = np.delete(instance.valuations, excluded, axis=0)
    sub = Instance(m=instance.m, k=instance.k, valuations=sub_values)
    sub_alloc, _ = solve_exact(sub)
    assignment: list[int | None] = []
    for i in range(instance.n):
        if i == excluded:
            assignment.append(None)
        else:
            assignment.append(sub_alloc.assignment[i if i < excluded else i - 1])
    return Allocation(tuple(assignment))


def _others_value(instance: Instance, allocation: Allocation, excluded: int) -> float:
    """Sum of allocated valuations over every agent except ``excluded``, in index order."""
    total = 0.0
    values = instance.valuations
    for i, slot in enumerate(allocation.assignment):
        if i != excluded and slot is not None:
            total += values[i, slot]
    return total


def delay_for_agent(
    instance: Instance,
    agent: int,
    full: Allocation,
    *,
    use_oracle: bool = False,
) -> float:
    """Clarke-pivot delay of one agent given the full optimal allocation.

    Computed as (others' welfare when the agent is removed and the
    sub-instance re-solved) minus (others' welfare under ``full``).  The
    raw value is non-negative whenever ``full`` is optimal, because the
    full allocation restricted to the others is feasible for the
    sub-instance; floating-point residue is clamped to zero after an
    invariant check.
    """
    if not 0 <= agent < instance.n:
        raise IndexError(f"agent index {agent} out of range for {instance.n} agents")
    without = _solve_without(instance, agent, use_oracle)
    raw = _others_value(instance, without, agent) - _others_value(instance, full, agent)
    if raw < _DELAY_FLOOR:
        raise MechanismInvariantError(
            f"negative delay {raw} for agent {agent}: full allocation was not optimal"
        )
    return max(raw, 0.0)


def run_period(instance: Instance, config: MechanismConfig | None = None) -> Outcome:
    """Run one period: optimal allocation plus per-agent VCG delays.

    Delays are n + 1 independent solves (one full, one per exclusion) and
    are emitted as raw reals; rounding to whole periods, if wanted, is a
    simulation concern.  Deterministic for a given instance.
    """
    cfg = config or MechanismConfig()
    allocation = _solve_full(instance, cfg.use_oracle)
    delays = tuple(
        delay_for_agent(instance, i, allocation, use_oracle=cfg.use_oracle)
        for i in range(instance.n)
    )
    return Outcome(allocation=allocation, delays=delays, welfare=welfare(instance, allocation))
