"""Offline allocation building blocks and verification oracles.

The offline procedures (largest-value-first, cut-and-choose, envy-cycle
elimination) feed the online followers; the brute-force and game-tree oracles
certify claims at desk scale.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    Allocation,
    ONE,
    ValuationProfile,
    ValuationVector,
    ZERO,
    fairness_report,
)


class BudgetExceededError(RuntimeError):
    """An oracle refused an instance above its enumeration budget."""


# ---------------------------------------------------------------------------
# Largest-value-first and cut-and-choose
# ---------------------------------------------------------------------------

def lpt(f: ValuationVector, n: int) -> Allocation:
    """Assign goods in non-ascending value to the currently least-valued bundle.

    Ties in the value ordering break by ascending good id, ties among minimum
    bundles by lowest agent id, so the output is deterministic.  For identical
    additive valuations the result is exactly envy-free up to any good.
    Runs in O(T log(nT)).
    """
    if n < 2:
        raise ValueError("need at least two agents")
    order = sorted(range(f.horizon), key=lambda g: (-f.values[g], g))
    bundles: list[set[int]] = [set() for _ in range(n)]
    heap: list[tuple[Fraction, int]] = [(ZERO, i) for i in range(n)]
    heapq.heapify(heap)
    for g in order:
        total, i = heapq.heappop(heap)
        bundles[i].add(g)
        heapq.heappush(heap, (total + f.values[g], i))
    return Allocation.of(bundles, num_goods=f.horizon)


def cut_and_choose(p1: ValuationVector, p2: ValuationVector) -> Allocation:
    """Two-agent split: balance under p1, let agent 1 pick its preferred half.

    The output is exactly envy-free up to any good under *both* input vectors.
    On a p2 tie the chooser keeps the second bundle.
    """
    if p1.horizon != p2.horizon:
        raise ValueError("both vectors must cover the same goods")
    base = lpt(p1, 2)
    b0, b1 = base.bundles
    chooser_takes_b0 = p2.value(b0) > p2.value(b1)
    if chooser_takes_b0:
        return Allocation.of([b1, b0], num_goods=p1.horizon)
    return Allocation.of([b0, b1], num_goods=p1.horizon)


# ---------------------------------------------------------------------------
# Envy graph machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnvyGraph:
    """Directed envy relation: edge (i, j) means i values j's bundle above its own."""

    agents: int
    edges: frozenset[tuple[int, int]]

    def in_degree(self, agent: int) -> int:
        return sum(1 for (_, j) in self.edges if j == agent)

    def sources(self) -> list[int]:
        envied = {j for (_, j) in self.edges}
        return [i for i in range(self.agents) if i not in envied]


def envy_graph(alloc: Allocation, profile: ValuationProfile) -> EnvyGraph:
    n = profile.agents
    edges = set()
    own = [profile.vector(i).value(alloc.bundles[i]) for i in range(n)]
    for i in range(n):
        vi = profile.vector(i)
        for j in range(n):
            if i != j and own[i] < vi.value(alloc.bundles[j]):
                edges.add((i, j))
    return EnvyGraph(agents=n, edges=frozenset(edges))


def _find_cycle(graph: EnvyGraph) -> Optional[list[int]]:
    """First directed cycle in lowest-agent-id DFS order, or None."""
    adj: dict[int, list[int]] = {i: [] for i in range(graph.agents)}
    for i, j in sorted(graph.edges):
        adj[i].append(j)
    color = {i: 0 for i in range(graph.agents)}  # 0 new, 1 on stack, 2 done
    for root in range(graph.agents):
        if color[root] != 0:
            continue
        stack: list[tuple[int, int]] = [(root, 0)]
        path: list[int] = []
        color[root] = 1
        path.append(root)
        while stack:
            node, idx = stack[-1]
            if idx < len(adj[node]):
                stack[-1] = (node, idx + 1)
                nxt = adj[node][idx]
                if color[nxt] == 1:
                    return path[path.index(nxt):]
                if color[nxt] == 0:
                    color[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, 0))
            else:
                color[node] = 2
                path.pop()
                stack.pop()
    return None


def eliminate_envy_cycles(alloc: Allocation, profile: ValuationProfile) -> Allocation:
    """Rotate bundles along envy cycles until the envy graph is acyclic.

    Each agent on a cycle receives the bundle of the agent it envies; bundle
    contents never change, only ownership.  Every rotation strictly reduces
    the edge count, so at most n(n-1)/2 rotations happen.
    """
    bundles = list(alloc.bundles)
    current = alloc
    for _ in range(profile.agents * (profile.agents - 1) // 2 + 1):
        cycle = _find_cycle(envy_graph(current, profile))
        if cycle is None:
            return current
        rotated = bundles[:]
        for pos, agent in enumerate(cycle):
            rotated[agent] = bundles[cycle[(pos + 1) % len(cycle)]]
        bundles = rotated
        current = Allocation.of(bundles, num_goods=alloc.num_goods)
    raise RuntimeError("cycle elimination failed to terminate")  # pragma: no cover


def unenvied_agent(alloc: Allocation, profile: ValuationProfile) -> int:
    """Lowest-id agent that nobody envies; requires an acyclic envy graph."""
    sources = envy_graph(alloc, profile).sources()
    if not sources:
        raise ValueError("envy graph has a cycle; eliminate cycles first")
    return min(sources)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def _best_factor_identical(values: tuple[Fraction, ...], n: int
                           ) -> tuple[Fraction, list[int]]:
    """Exact max envy factor over all allocations, identical valuations.

    Enumerates set partitions in restricted-growth form (agent labels are
    interchangeable when valuations are identical) and stops early once an
    exact allocation is found.
    """
    t_total = len(values)
    best = Fraction(-1)
    best_assign: list[int] = [0] * t_total
    assign = [0] * t_total
    sums = [ZERO] * n
    mins: list[Optional[Fraction]] = [None] * n
    sizes = [0] * n

    def factor_of_leaf(used: int) -> Fraction:
        drops: list[tuple[Fraction, int]] = []
        for b in range(used):
            if sizes[b] > 0:
                d = sums[b] - mins[b]  # type: ignore[operator]
                if d > 0:
                    drops.append((d, b))
        if not drops:
            return ONE
        if used < n:
            return ZERO  # an empty bundle envies any positive remainder
        drops.sort(reverse=True)
        top_d, top_b = drops[0]
        second = drops[1][0] if len(drops) > 1 else None
        factor = ONE
        for b in range(used):
            den = top_d if b != top_b else second
            if den is None or den <= 0:
                continue
            r = sums[b] / den
            if r < factor:
                factor = r
        return factor

    def rec(t: int, used: int) -> None:
        nonlocal best, best_assign
        if best == 1:
            return
        if t == t_total:
            f = factor_of_leaf(used)
            if f > best:
                best = f
                best_assign = assign[:]
            return
        v = values[t]
        for b in range(min(used + 1, n)):
            assign[t] = b
            old_min, old_size, old_sum = mins[b], sizes[b], sums[b]
            sums[b] = old_sum + v
            sizes[b] = old_size + 1
            mins[b] = v if old_min is None or v < old_min else old_min
            rec(t + 1, max(used, b + 1))
            mins[b], sizes[b], sums[b] = old_min, old_size, old_sum

    rec(0, 0)
    return best, best_assign


def _best_factor_general(profile: ValuationProfile, budget: int
                         ) -> tuple[Fraction, list[int]]:
    n, t_total = profile.agents, profile.horizon
    best = Fraction(-1)
    best_assign = [0] * t_total
    assign = [0] * t_total
    while True:
        alloc = Allocation.of(
            [[g for g in range(t_total) if assign[g] == i] for i in range(n)],
            num_goods=t_total)
        f = fairness_report(alloc, profile).efx_factor
        if f > best:
            best = f
            best_assign = assign[:]
            if best == 1:
                break
        # next base-n counter value
        pos = t_total - 1
        while pos >= 0 and assign[pos] == n - 1:
            assign[pos] = 0
            pos -= 1
        if pos < 0:
            break
        assign[pos] += 1
    return best, best_assign


def brute_force_best_factor(profile: ValuationProfile, budget: int = 10 ** 7
                            ) -> tuple[Fraction, Allocation]:
    """Exhaustive maximum envy factor with a witness allocation.

    Refuses instances whose n^T search space exceeds ``budget``.
    """
    n, t_total = profile.agents, profile.horizon
    if n ** t_total > budget:
        raise BudgetExceededError(
            f"{n}^{t_total} allocations exceed the enumeration budget {budget}")
    if profile.identical:
        best, assign = _best_factor_identical(profile.vector(0).values, n)
    else:
        best, assign = _best_factor_general(profile, budget)
    witness = Allocation.of(
        [[g for g in range(t_total) if assign[g] == i] for i in range(n)],
        num_goods=t_total)
    return best, witness


# ---------------------------------------------------------------------------
# Minimax game-tree oracle
# ---------------------------------------------------------------------------

def _bundle_update(bstates, agent: int, values: tuple[Fraction, ...]):
    """Add a good with per-observer values to one bundle's (sum, min) stats."""
    updated = []
    for b, obs in enumerate(bstates):
        if b != agent:
            updated.append(obs)
            continue
        new_obs = []
        for o, (s, m) in enumerate(obs):
            w = values[o]
            new_obs.append((s + w, w if m is None or w < m else m))
        updated.append(tuple(new_obs))
    return tuple(updated)


def _factor_from_bundle_states(bstates, n: int) -> Fraction:
    factor = ONE
    for i in range(n):
        own = bstates[i][i][0]
        for j in range(n):
            if j == i:
                continue
            s, m = bstates[j][i]
            if m is None:
                continue
            den = s - m
            if den <= 0:
                continue
            r = own / den
            if r < factor:
                factor = min(ONE, r)
    return factor


def minimax_online_factor(adversary, node_budget: int = 10 ** 6) -> Fraction:
    """Best envy factor any deterministic online algorithm can force.

    Against an adaptive opponent (a branching program over the algorithm's
    decision history) this is plain backward induction with memoization on
    (opponent state, bundle statistics).  Opponents that instead fix a family
    of complete value assignments up front (the truth-oblivious benchmark)
    are scored as max over assignment sequences of the min over the family.
    """
    family = getattr(adversary, "oblivious_family", None)
    if family is not None:
        return _oblivious_value(adversary, family)

    n = adversary.n
    horizon = adversary.horizon
    empty_obs = tuple((ZERO, None) for _ in range(n))
    start_bundles = tuple(empty_obs for _ in range(n))
    memo: dict = {}
    nodes = 0

    def rec(astate, bstates, t: int) -> Fraction:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(f"minimax search exceeded {node_budget} nodes")
        if t == horizon:
            return _factor_from_bundle_states(bstates, n)
        key = (astate, bstates, t)
        if key in memo:
            return memo[key]
        values = adversary.reveal(astate)
        best = ZERO - 1
        for d in range(n):
            val = rec(adversary.advance(astate, d), _bundle_update(bstates, d, values), t + 1)
            if val > best:
                best = val
        memo[key] = best
        return best

    return rec(adversary.start(), start_bundles, 0)


def _oblivious_value(adversary, family) -> Fraction:
    """max over decision sequences of the min factor across the truth family."""
    n = adversary.n
    t_total = adversary.horizon
    identical = all(p.identical for p in family)
    best = ZERO - 1
    assign = [0] * t_total

    def score() -> Fraction:
        alloc = Allocation.of(
            [[g for g in range(t_total) if assign[g] == i] for i in range(n)],
            num_goods=t_total)
        return min(fairness_report(alloc, profile).efx_factor for profile in family)

    def rec(t: int, used: int) -> None:
        nonlocal best
        if t == t_total:
            s = score()
            if s > best:
                best = s
            return
        limit = min(used + 1, n) if identical else n
        for b in range(limit):
            assign[t] = b
            rec(t + 1, max(used, b + 1))

    rec(0, 0)
    return best
