"""Matroid markets: per-item matroids on the agent set, staged allocation, exact intersection.

A matroid market generalizes a matching market: several agents may share an
item as long as they form an independent set of that item's matroid (a
matching market is the rank-1 uniform case).  The staged algorithm keeps the
allocation, viewed as an edge set, a *maximal* common independent set of the
direct-sum matroid (per-item independence) and the partition matroid (one item
per agent) restricted to the top-r graph after every stage r; any maximal
common independent set is at least half a maximum one, so the per-rank factor
is 2.

The exact benchmark uses the standard exchange-graph augmenting-path algorithm
for matroid intersection, cross-checkable against exhaustive search at desk
scale.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import DomainError, ResourceError, StructuralError
from .prefs import RankHistogram, StrictProfile
from .verify import SocialChoiceFunction

@dataclass(frozen=True)
class UniformMatroid:
    """Independent iff at most k agents."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise DomainError("uniform matroid rank must be >= 0")

    def is_independent(self, agents: Iterable[int]) -> bool:
        return len(set(agents)) <= self.k


@dataclass(frozen=True)
class PartitionMatroid:
    """Agents are colored by ``groups``; independent iff each color stays under its cap."""

    groups: tuple[int, ...]
    caps: tuple[tuple[int, int], ...]  # (color, cap) pairs

    def __post_init__(self):
        cap_map = dict(self.caps)
        if len(cap_map) != len(self.caps):
            raise DomainError("duplicate color in partition caps")
        if any(c < 0 for c in cap_map.values()):
            raise DomainError("partition caps must be >= 0")
        missing = {g for g in self.groups if g not in cap_map}
        if missing:
            raise DomainError(f"colors {sorted(missing)} have no cap")

    def is_independent(self, agents: Iterable[int]) -> bool:
        cap_map = dict(self.caps)
        counts: dict[int, int] = {}
        for a in set(agents):
            g = self.groups[a]
            counts[g] = counts.get(g, 0) + 1
            if counts[g] > cap_map[g]:
                return False
        return True


class ExplicitMatroid:
    """Matroid given by its full list of independent sets; axioms checked on build."""

    def __init__(self, ground: Iterable[int], independent: Iterable[Iterable[int]]):
        self.ground = frozenset(ground)
        self.independent = frozenset(frozenset(s) for s in independent)
        ok, why = check_matroid_axioms(self, self.ground)
        if not ok:
            raise StructuralError(f"independent-set list is not a matroid: {why}")

    def is_independent(self, agents: Iterable[int]) -> bool:
        return frozenset(agents) in self.independent


def check_matroid_axioms(matroid, ground: Iterable[int]) -> tuple[bool, str | None]:
    """Exhaustive check of the three axioms on ``ground`` (2^|ground| subsets)."""
    ground = sorted(set(ground))
    if len(ground) > 12:
        raise ResourceError("axiom check capped at ground sets of size 12")
    subsets = []
    for size in range(len(ground) + 1):
        subsets.extend(frozenset(c) for c in itertools.combinations(ground, size))
    indep = {s for s in subsets if matroid.is_independent(s)}
    if frozenset() not in indep:
        return False, "empty set is dependent"
    for s in indep:
        for e in s:
            if s - {e} not in indep:
                return False, f"downward closure fails at {set(s)} minus {e}"
    for a in indep:
        for b in indep:
            if len(a) > len(b) and not any(b | {e} in indep for e in a - b):
                return False, f"exchange fails between {set(a)} and {set(b)}"
    return True, None


def greedy_rank(matroid, agents: Iterable[int]) -> int:
    """Matroid rank of a set via greedy closure (valid by the exchange axiom)."""
    acc: set[int] = set()
    for a in sorted(set(agents)):
        if matroid.is_independent(acc | {a}):
            acc.add(a)
    return len(acc)


@dataclass(frozen=True)
class MatroidMarket:
    """Strict item preferences plus one matroid per item (index = item - 1)."""

    profile: StrictProfile
    matroids: tuple

    def __post_init__(self):
        if len(self.matroids) != self.profile.m:
            raise DomainError("need exactly one matroid per item")

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence[int]], matroids: Sequence) -> "MatroidMarket":
        m = len(matroids)
        universe = tuple(range(1, m + 1))
        return cls(StrictProfile(universe, tuple(tuple(l) for l in lists)), tuple(matroids))

    @property
    def n(self) -> int:
        return self.profile.n_agents

    @property
    def m(self) -> int:
        return self.profile.m

    @property
    def items(self) -> tuple:
        return self.profile.universe

    def pos(self, agent: int, item) -> int:
        return self.profile.pos(agent, item)

    def alt(self, agent: int, rank: int):
        return self.profile.alt(agent, rank)

    def matroid_of(self, item):
        return self.matroids[item - 1]


@dataclass(frozen=True)
class Allocation:
    """assign[j] = item or None; agents sharing an item must be independent there."""

    assign: tuple

    def item_of(self, agent: int):
        return self.assign[agent]

    @property
    def size(self) -> int:
        return sum(1 for i in self.assign if i is not None)

    def holders(self, item) -> frozenset:
        return frozenset(j for j, i in enumerate(self.assign) if i == item)


def allocation_feasible(alloc: Allocation, market: MatroidMarket) -> bool:
    return all(market.matroid_of(i).is_independent(alloc.holders(i)) for i in market.items)


def allocation_histogram(alloc: Allocation, market: MatroidMarket) -> RankHistogram:
    positions = [market.pos(j, it) for j, it in enumerate(alloc.assign) if it is not None]
    return RankHistogram(
        tuple(sum(1 for p in positions if p <= r) for r in range(1, market.m + 1))
    )


def check_matint(S: Sequence, A: Sequence) -> bool:
    """Half-optimality of maximal common independent sets: |S| >= |A| / 2."""
    return 2 * len(S) >= len(A)


def matroid_max_match(market: MatroidMarket, check_stages: bool = True) -> Allocation:
    """Staged allocation: after stage r, the edge set is maximal common independent in top-r.

    Agents and items are scanned in ascending index.  With ``check_stages`` the
    run asserts, per stage, both maximality and the half-of-optimum property
    against the exact intersection oracle.
    """
    n, m = market.n, market.m
    assign: list = [None] * n
    holders: dict = {i: set() for i in market.items}
    size = 0
    for r in range(1, m + 1):
        for item in market.items:
            matroid = market.matroid_of(item)
            for j in range(n):
                if assign[j] is None and market.pos(j, item) <= r:
                    if matroid.is_independent(holders[item] | {j}):
                        holders[item].add(j)
                        assign[j] = item
                        size += 1
        for j in range(n):  # maximality certificate
            if assign[j] is None:
                for rr in range(1, r + 1):
                    item = market.alt(j, rr)
                    if market.matroid_of(item).is_independent(holders[item] | {j}):
                        raise StructuralError("stage invariant broken: allocation not maximal")
        if check_stages:
            opt = maxrank_matroid(market, r)
            if not check_matint(range(size), range(opt)):
                raise StructuralError(
                    f"stage {r}: maximal set of size {size} below half of optimum {opt}"
                )
    return Allocation(tuple(assign))


# ---------------------------------------------------------------------------
# Exact matroid intersection (exchange graph, shortest augmenting paths)
# ---------------------------------------------------------------------------


def matroid_intersection(
    elements: Sequence,
    ind1: Callable[[frozenset], bool],
    ind2: Callable[[frozenset], bool],
) -> frozenset:
    """Maximum-cardinality set independent in both matroids.

    Repeatedly augments along a shortest source-sink path of the exchange
    graph: arcs y->x when I - y + x stays independent in matroid 1, arcs x->y
    when it stays independent in matroid 2; sources are elements addable under
    matroid 1, sinks those addable under matroid 2.
    """
    elements = list(elements)
    current: frozenset = frozenset()
    while True:
        inside = current
        outside = [e for e in elements if e not in inside]
        sources = [e for e in outside if ind1(inside | {e})]
        sinks = {e for e in outside if ind2(inside | {e})}
        if not sources or not sinks:
            return current
        arcs: dict = {e: [] for e in elements}
        for y in inside:
            base = inside - {y}
            for x in outside:
                swapped = base | {x}
                if ind1(swapped):
                    arcs[y].append(x)
                if ind2(swapped):
                    arcs[x].append(y)
        parent: dict = {}
        queue = deque()
        for s in sources:
            parent[s] = None
            queue.append(s)
        target = None
        while queue:
            u = queue.popleft()
            if u in sinks:
                target = u
                break
            for v in arcs[u]:
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        if target is None:
            return current
        path = []
        node = target
        while node is not None:
            path.append(node)
            node = parent[node]
        current = current.symmetric_difference(path)
        if not (ind1(current) and ind2(current)):
            raise StructuralError("augmentation produced a dependent set (broken oracle?)")


def _edges_top_r(market: MatroidMarket, r: int) -> list[tuple[int, int]]:
    return [
        (j, i)
        for j in range(market.n)
        for i in market.items
        if market.pos(j, i) <= r
    ]


def _direct_sum_ind(market: MatroidMarket) -> Callable[[frozenset], bool]:
    def ind(edges: frozenset) -> bool:
        per_item: dict = {}
        for j, i in edges:
            per_item.setdefault(i, set()).add(j)
        return all(
            market.matroid_of(i).is_independent(agents) for i, agents in per_item.items()
        )

    return ind


def _one_item_per_agent(edges: frozenset) -> bool:
    agents = [j for j, _ in edges]
    return len(agents) == len(set(agents))


def maxrank_matroid(market: MatroidMarket, r: int) -> int:
    """Exact maxrank_r: the largest common independent set in the top-r graph."""
    if not 1 <= r <= market.m:
        raise DomainError(f"rank {r} out of range 1..{market.m}")
    return len(
        matroid_intersection(_edges_top_r(market, r), _direct_sum_ind(market), _one_item_per_agent)
    )


def maxrank_matroid_brute(market: MatroidMarket, r: int) -> int:
    """Independent cross-check: exhaustive assignment search (n <= 8)."""
    if market.n > 8:
        raise ResourceError("brute-force matroid oracle capped at n <= 8")
    best = 0

    def rec(j: int, holders: dict, size: int):
        nonlocal best
        if size + (market.n - j) <= best:
            return
        if j == market.n:
            best = max(best, size)
            return
        rec(j + 1, holders, size)
        for rr in range(1, r + 1):
            item = market.alt(j, rr)
            if market.matroid_of(item).is_independent(holders[item] | {j}):
                holders[item].add(j)
                rec(j + 1, holders, size + 1)
                holders[item].remove(j)

    rec(0, {i: set() for i in market.items}, 0)
    return best


def maxranks_matroid(market: MatroidMarket) -> list[int]:
    return [maxrank_matroid(market, r) for r in range(1, market.m + 1)]


def matroid_scf(matroids: Sequence, n: int) -> SocialChoiceFunction:
    """The staged allocation as an SCF over the full strict-list domain."""
    m = len(matroids)
    items = tuple(range(1, m + 1))

    def ev(profile) -> Allocation:
        market = MatroidMarket.from_lists([list(p) for p in profile], matroids)
        return matroid_max_match(market, check_stages=False)

    def singleton(a: int, pref, r: int) -> Allocation:
        return Allocation(tuple(pref[r - 1] if j == a else None for j in range(n)))

    return SocialChoiceFunction(
        tuple(tuple(itertools.permutations(items)) for _ in range(n)),
        ev,
        outcome_label=lambda alloc, agent: alloc.item_of(agent),
        representative=singleton,
    )
