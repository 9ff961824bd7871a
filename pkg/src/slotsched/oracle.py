"""Exact brute-force reference solver.

Enumerates every feasible 0/1 assignment of agents to slots and picks a
welfare maximizer.  This is the ground truth that the production flow
solver is checked against; it is deliberately the simplest auditable
implementation and is only meant for small instances.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from . import _kernels
from .core import Allocation, Instance

__all__ = ["InstanceTooLargeError", "enumerate_allocations", "solve_exact", "MAX_AGENTS"]

MAX_AGENTS = 10


class InstanceTooLargeError(ValueError):
    """Raised when an instance exceeds the enumeration guard."""


def _check_size(instance: Instance) -> None:
    if instance.n > MAX_AGENTS:
        raise InstanceTooLargeError(
            f"exhaustive enumeration is guarded at n <= {MAX_AGENTS}, got n = {instance.n}"
        )


def enumerate_allocations(instance: Instance) -> Iterator[Allocation]:
    """Yield every feasible allocation exactly once.

    Per-agent choices run over slot 0..m-1 and then unallocated, with
    incremental capacity pruning.  The yield order is lexicographic in
    those choices with unallocated last, which is also the documented
    tie-break order of ``solve_exact``.
    """
    _check_size(instance)
    n, m, k = instance.n, instance.m, instance.k
    choice: list[int | None] = [None] * n
    loads = [0] * m

    def rec(depth: int) -> Iterator[Allocation]:
        if depth == n:
            yield Allocation(tuple(choice))
            return
        for slot in range(m):
            if loads[slot] < k:
                loads[slot] += 1
                choice[depth] = slot
                yield from rec(depth + 1)
                loads[slot] -= 1
        choice[depth] = None
        yield from rec(depth + 1)

    yield from rec(0)


def solve_exact(instance: Instance) -> tuple[Allocation, float]:
    """Return a welfare-maximizing allocation and its welfare.

    Ties are broken by enumeration order: the first maximizer in the
    lexicographic order of ``enumerate_allocations`` wins.  Welfare is
    summed in agent-index order, the same order ``core.welfare`` uses.
    """
    _check_size(instance)
    values = np.ascontiguousarray(instance.valuations, dtype=np.float64)
    assign, best = _kernels.exact_best(values, instance.k)
    allocation = Allocation(tuple(None if s < 0 else int(s) for s in assign))
    return allocation, float(best)
