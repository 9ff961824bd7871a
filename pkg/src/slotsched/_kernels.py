"""Compiled inner loops for the flow solver and the exhaustive search.

The algorithms are implemented here in flat-array form so numba can
compile them; the readable object-level interfaces live in ``solver``
and ``oracle``.  Semantics are identical with JIT disabled
(``NUMBA_DISABLE_JIT=1``), just slower.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def ssp_assign(values, k):  # pragma: no cover - exercised via solver tests
    """Successive shortest augmenting paths with node potentials.

    Solves the capacity-constrained assignment on the bipartite
    source/agents/slots/sink network with arc costs equal to negated
    valuations.  Distances are computed on slot nodes plus the sink;
    agent nodes sit in the middle of two-hop arcs (enter via the best
    unassigned agent of a slot's column, move via a slot's currently
    assigned agents), so their potentials cancel and never need to be
    stored.  Augments while the shortest path's real cost stays <= 0 and
    stops at the first strictly positive path, which maximizes total
    valuation and, among optima, the number of assigned agents.

    Returns ``(sigma, path_costs, slot_potentials)`` where ``sigma[i]``
    is the slot of agent ``i`` or -1, ``path_costs`` holds the real cost
    of each augmentation (non-decreasing), and ``slot_potentials`` has
    one entry per slot plus the sink.
    """
    n, m = values.shape
    sigma = np.full(n, -1, dtype=np.int64)
    q = np.zeros(m + 1, dtype=np.float64)
    empty = np.empty(0, dtype=np.float64)
    if n == 0:
        return sigma, empty, q

    # Initial potentials: one pass over the negated agent->slot arcs so
    # every reduced cost starts non-negative.
    for j in range(m):
        best = 0.0
        for i in range(n):
            if values[i, j] > best:
                best = values[i, j]
        q[j] = -best
    qmin = q[0]
    for j in range(1, m):
        if q[j] < qmin:
            qmin = q[j]
    q[m] = qmin

    cap = k if k < n else n
    if cap < 1:
        cap = 1
    members = np.zeros((m, cap), dtype=np.int64)
    load = np.zeros(m, dtype=np.int64)

    # Column-wise agent order by descending valuation; stable sort keeps
    # equal-valued agents in index order for deterministic tie-breaking.
    order = np.empty((m, n), dtype=np.int64)
    neg = np.empty(n, dtype=np.float64)
    for j in range(m):
        for i in range(n):
            neg[i] = -values[i, j]
        order[j] = np.argsort(neg, kind="mergesort")
    ptr = np.zeros(m, dtype=np.int64)

    dist = np.empty(m + 1, dtype=np.float64)
    done = np.empty(m + 1, dtype=np.bool_)
    parent_slot = np.empty(m + 1, dtype=np.int64)
    parent_agent = np.empty(m + 1, dtype=np.int64)

    total_cap = m * k
    max_assign = total_cap if total_cap < n else n
    path_costs = np.empty(max_assign, dtype=np.float64)
    n_aug = 0

    while n_aug < max_assign:
        for v in range(m + 1):
            dist[v] = np.inf
            done[v] = False
            parent_slot[v] = -2
            parent_agent[v] = -1
        # Entry arcs: the best still-unassigned agent of each column.
        # Assigned agents never return to the pool within one solve, so
        # the column pointers only ever move forward.
        for j in range(m):
            p = ptr[j]
            while p < n and sigma[order[j, p]] != -1:
                p += 1
            ptr[j] = p
            if p < n:
                a = order[j, p]
                d = -values[a, j] - q[j]
                dist[j] = d
                parent_slot[j] = -1
                parent_agent[j] = a

        while True:
            u = -1
            best = np.inf
            for v in range(m + 1):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u == -1 or u == m:
                break
            done[u] = True
            du = dist[u]
            if load[u] < k:
                cand = du + q[u] - q[m]
                if cand < dist[m]:
                    dist[m] = cand
                    parent_slot[m] = u
            for idx in range(load[u]):
                i = members[u, idx]
                base = du + values[i, u] + q[u]
                for j2 in range(m):
                    if done[j2]:
                        continue
                    cand = base - values[i, j2] - q[j2]
                    if cand < dist[j2]:
                        dist[j2] = cand
                        parent_slot[j2] = u
                        parent_agent[j2] = i

        if dist[m] == np.inf:
            break
        real_cost = dist[m] + q[m]
        if real_cost > 0.0:
            break

        dt = dist[m]
        for v in range(m + 1):
            dv = dist[v]
            q[v] += dv if dv < dt else dt

        # Apply the augmentation, walking sink -> entry.  Each hop moves
        # one already-assigned agent between slots; the entry hop assigns
        # a new agent.  Removal precedes the next insertion, so slot
        # member arrays never overflow their capacity.
        j = parent_slot[m]
        while True:
            i = parent_agent[j]
            prev = parent_slot[j]
            if prev >= 0:
                li = load[prev]
                for idx in range(li):
                    if members[prev, idx] == i:
                        members[prev, idx] = members[prev, li - 1]
                        break
                load[prev] = li - 1
            sigma[i] = j
            members[j, load[j]] = i
            load[j] += 1
            if prev < 0:
                break
            j = prev

        path_costs[n_aug] = real_cost
        n_aug += 1

    return sigma, path_costs[:n_aug], q


@njit(cache=True)
def exact_best(values, k):  # pragma: no cover - exercised via oracle tests
    """Exhaustive search over all feasible assignments.

    Depth-first over per-agent choices in the order slot 0, ..slot m-1,
    unallocated, pruning branches that would exceed slot capacity.  The
    first assignment attaining the maximum welfare in that lexicographic
    order wins.  Welfare is accumulated through prefix sums in agent
    order, matching the summation order of ``core.welfare`` bit for bit.
    """
    n, m = values.shape
    best_assign = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return best_assign, 0.0

    choice = np.full(n, -1, dtype=np.int64)
    load = np.zeros(m, dtype=np.int64)
    prefix = np.zeros(n + 1, dtype=np.float64)
    best_w = -np.inf
    depth = 0

    while True:
        c = choice[depth]
        if 0 <= c < m:
            load[c] -= 1
        c += 1
        while c < m and load[c] >= k:
            c += 1
        if c > m:
            choice[depth] = -1
            depth -= 1
            if depth < 0:
                break
            continue
        choice[depth] = c
        if c < m:
            load[c] += 1
            prefix[depth + 1] = prefix[depth] + values[depth, c]
        else:
            prefix[depth + 1] = prefix[depth]
        if depth == n - 1:
            if prefix[n] > best_w:
                best_w = prefix[n]
                for i in range(n):
                    best_assign[i] = choice[i]
        else:
            depth += 1

    for i in range(n):
        if best_assign[i] == m:
            best_assign[i] = -1
    return best_assign, best_w
