"""One-sided matching markets: the staged maximal-matching algorithm and classic baselines.

Agents hold strict preference lists over items; an outcome matches each agent
to at most one item (injectively), with unmatched modeled as ``None`` and
ranked below every real item.

``max_match`` runs in stages r = 1..m keeping the matching maximal in the
"top-r" graph after stage r, which yields a 2-rank-approximation (a maximal
matching is at least half a maximum one) and pseudomonotonicity.  The exact
per-rank benchmark ``maxrank_r`` is the maximum-cardinality matching in the
top-r graph, computed by Hopcroft-Karp.

Baselines: random serial dictatorship (exact lottery by permutation
enumeration), top-trading cycles from an endowment, and the probabilistic-
serial eating algorithm with an exact Birkhoff-von Neumann decomposition of
its fractional matching.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DomainError, ResourceError, StructuralError
from .prefs import Lottery, RankHistogram, StrictProfile
from .verify import MechanismUnderTest, SocialChoiceFunction

EXACT_RSD_CAP = 8
BRUTE_MATCHING_CAP = 8


@dataclass(frozen=True)
class MatchingInstance:
    """n agents with strict complete lists over items 1..m."""

    profile: StrictProfile

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence[int]], m: int | None = None) -> "MatchingInstance":
        if m is None:
            m = len(lists[0]) if lists else 0
        universe = tuple(range(1, m + 1))
        return cls(StrictProfile(universe, tuple(tuple(l) for l in lists)))

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


@dataclass(frozen=True)
class Matching:
    """Partial injective assignment ``assign[j] = item or None``."""

    assign: tuple

    def __post_init__(self):
        taken = [i for i in self.assign if i is not None]
        if len(taken) != len(set(taken)):
            raise DomainError("matching assigns one item to two agents")

    def item_of(self, agent: int):
        return self.assign[agent]

    @property
    def size(self) -> int:
        return sum(1 for i in self.assign if i is not None)

    def pairs(self) -> Iterator[tuple[int, int]]:
        return ((j, i) for j, i in enumerate(self.assign) if i is not None)


def singleton_matching(n: int, agent: int, item) -> Matching:
    return Matching(tuple(item if j == agent else None for j in range(n)))


def matching_histogram(matching: Matching, inst: MatchingInstance) -> RankHistogram:
    """rank_r over item positions 1..m, counting only matched agents."""
    positions = [
        inst.pos(j, it) for j, it in enumerate(matching.assign) if it is not None
    ]
    return RankHistogram(tuple(sum(1 for p in positions if p <= r) for r in range(1, inst.m + 1)))


def expected_matching_histogram(lottery: Lottery, inst: MatchingInstance) -> tuple[Fraction, ...]:
    acc = [Fraction(0)] * inst.m
    for matching, w in lottery.items():
        for i, c in enumerate(matching_histogram(matching, inst).counts):
            acc[i] += w * c
    return tuple(acc)


# ---------------------------------------------------------------------------
# Hopcroft-Karp maximum bipartite matching
# ---------------------------------------------------------------------------


def hopcroft_karp(adjacency: Sequence[Sequence[int]], n_right: int) -> tuple[int, list]:
    """Maximum matching; ``adjacency[u]`` lists right-neighbors of left node ``u``.

    Returns ``(size, match_left)`` with ``match_left[u]`` the right partner or None.
    """
    n_left = len(adjacency)
    INF = math.inf
    match_l: list = [None] * n_left
    match_r: list = [None] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adjacency[u]:
            w = match_r[v]
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    size = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] is None and dfs(u):
                size += 1
    return size, match_l


# ---------------------------------------------------------------------------
# MaxMatch and the exact maxrank oracle
# ---------------------------------------------------------------------------


def max_match(inst: MatchingInstance) -> Matching:
    """Staged maximal matching: after stage r the matching is maximal in the top-r graph.

    Ties are fixed: items are scanned in ascending index and each picks the
    lowest-index unmatched agent ranking it within the top r.  Maximality after
    every stage is re-checked and is what the factor-2 guarantee rests on.
    """
    n, m = inst.n, inst.m
    agent_item: list = [None] * n
    item_agent: dict = {}
    for r in range(1, m + 1):
        for item in inst.items:
            if item in item_agent:
                continue
            picked = next(
                (j for j in range(n) if agent_item[j] is None and inst.pos(j, item) <= r),
                None,
            )
            if picked is not None:
                agent_item[picked] = item
                item_agent[item] = picked
        for j in range(n):
            if agent_item[j] is None:
                for rr in range(1, r + 1):
                    if inst.alt(j, rr) not in item_agent:
                        raise StructuralError("stage invariant broken: matching not maximal")
    return Matching(tuple(agent_item))


def top_r_adjacency(inst: MatchingInstance, r: int) -> list[list[int]]:
    return [[inst.alt(j, rr) - 1 for rr in range(1, r + 1)] for j in range(inst.n)]


def maxrank_matching(inst: MatchingInstance, r: int) -> int:
    """Size of a maximum matching in the top-r graph; this equals maxrank_r."""
    if not 1 <= r <= inst.m:
        raise DomainError(f"rank {r} out of range 1..{inst.m}")
    size, _ = hopcroft_karp(top_r_adjacency(inst, r), inst.m)
    return size


def maxranks_matching(inst: MatchingInstance) -> list[int]:
    return [maxrank_matching(inst, r) for r in range(1, inst.m + 1)]


def iter_matchings(inst: MatchingInstance) -> Iterator[Matching]:
    """All partial matchings (exponential; desk scale only)."""
    n = inst.n
    if n > BRUTE_MATCHING_CAP:
        raise ResourceError(f"matching enumeration capped at n <= {BRUTE_MATCHING_CAP}")

    def rec(j: int, used: set, acc: list):
        if j == n:
            yield Matching(tuple(acc))
            return
        acc.append(None)
        yield from rec(j + 1, used, acc)
        acc.pop()
        for item in inst.items:
            if item not in used:
                used.add(item)
                acc.append(item)
                yield from rec(j + 1, used, acc)
                acc.pop()
                used.remove(item)

    yield from rec(0, set(), [])


def maxrank_matching_brute(inst: MatchingInstance, r: int) -> int:
    """Independent oracle: exhaustive search over top-r matchings."""
    if inst.n > BRUTE_MATCHING_CAP:
        raise ResourceError(f"brute-force oracle capped at n <= {BRUTE_MATCHING_CAP}")
    best = 0

    def rec(j: int, used: set, size: int):
        nonlocal best
        if size + (inst.n - j) <= best:
            return
        if j == inst.n:
            best = max(best, size)
            return
        rec(j + 1, used, size)
        for rr in range(1, r + 1):
            item = inst.alt(j, rr)
            if item not in used:
                used.add(item)
                rec(j + 1, used, size + 1)
                used.remove(item)

    rec(0, set(), 0)
    return best


# ---------------------------------------------------------------------------
# Hard instances
# ---------------------------------------------------------------------------


def gen_matching_lb(K: int) -> MatchingInstance:
    """The 2K-1 agent market where every matching has factor >= (2K-1)/K.

    First preferences: agent 1 wants item 1, everyone else wants item n.
    Middle ranks r = 2..K-1: agent r wants item r, agent r-1 wants item K+r-1,
    everyone else wants item r-1.  Rank K: agent K-1 wants item K, everyone
    else wants item K-1.  Remaining positions are filled ascending.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    n = 2 * K - 1
    lists = []
    for j in range(1, n + 1):  # 1-based agents
        prefix: list[int] = [1 if j == 1 else n]
        for r in range(2, K):
            if j == r:
                prefix.append(r)
            elif j == r - 1:
                prefix.append(K + r - 1)
            else:
                prefix.append(r - 1)
        if K >= 2:
            prefix.append(K if j == K - 1 else K - 1)
        lists.append(_fill_tail(prefix, n))
    return MatchingInstance.from_lists(lists, n)


def gen_sqrt_instance(n: int) -> MatchingInstance:
    """The k = ceil(sqrt(n)) grouped market on which RSD and PS lose a sqrt(n) factor.

    Agents 1..k put their own item first; the remaining n-k agents split into k
    equal groups, all putting item n first and their group's item second.
    Requires the group size (n-k)/k to be a positive integer, as in n = 4, 9, 16.
    """
    k = math.isqrt(n)
    if k * k < n:
        k += 1
    if k < 2 or n <= k or (n - k) % k:
        raise DomainError(f"n={n} does not split into k={k} equal groups")
    group = (n - k) // k
    lists = []
    for j in range(1, k + 1):
        lists.append(_fill_tail([j], n))
    for ell in range(1, k + 1):
        for _ in range(group):
            lists.append(_fill_tail([n, ell], n))
    return MatchingInstance.from_lists(lists, n)


def _fill_tail(prefix: Sequence[int], m: int) -> list[int]:
    seen = set(prefix)
    if len(seen) != len(prefix):
        raise DomainError(f"prefix {prefix} repeats an item")
    return list(prefix) + [i for i in range(1, m + 1) if i not in seen]


# ---------------------------------------------------------------------------
# Baselines: RSD, TTCA, PS + Birkhoff-von Neumann
# ---------------------------------------------------------------------------


def serial_dictatorship(inst: MatchingInstance, order: Sequence[int]) -> Matching:
    assign: list = [None] * inst.n
    taken: set = set()
    for j in order:
        choice = next((inst.alt(j, r) for r in range(1, inst.m + 1) if inst.alt(j, r) not in taken), None)
        if choice is not None:
            assign[j] = choice
            taken.add(choice)
    return Matching(tuple(assign))


def rsd(inst: MatchingInstance) -> Lottery:
    """Exact RSD lottery over matchings by enumerating all n! agent orders."""
    if inst.n > EXACT_RSD_CAP:
        raise ResourceError(f"exact RSD capped at n <= {EXACT_RSD_CAP}; use rsd_sampled")
    total = math.factorial(inst.n)
    w = Fraction(1, total)
    return Lottery(
        (serial_dictatorship(inst, order), w)
        for order in itertools.permutations(range(inst.n))
    )


def rsd_sampled(inst: MatchingInstance, samples: int, seed: int) -> Lottery:
    """Empirical RSD lottery from ``samples`` seeded draws (Mersenne Twister)."""
    if samples < 1:
        raise DomainError("need at least one sample")
    rng = random.Random(seed)
    w = Fraction(1, samples)
    draws = []
    for _ in range(samples):
        order = list(range(inst.n))
        rng.shuffle(order)
        draws.append((serial_dictatorship(inst, order), w))
    return Lottery(draws)


def ttca(inst: MatchingInstance, endowment: Matching | None = None, cycle_rule: str = "lowest") -> Matching:
    """Top-trading cycles from a perfect endowment (default: agent j owns item j+1).

    Each round, every active agent points at the owner of his favorite item
    still held by an active agent; one cycle trades and leaves.  The final
    allocation is independent of which cycle is picked each round; the shipped
    rules are "lowest" (walk from the lowest-index active agent) and "highest".
    """
    if inst.n != inst.m:
        raise DomainError("top trading cycles needs n == m")
    if endowment is None:
        endowment = Matching(tuple(range(1, inst.n + 1)))
    if endowment.size != inst.n:
        raise DomainError("endowment must be a perfect matching")
    if cycle_rule not in ("lowest", "highest"):
        raise DomainError(f"unknown cycle rule {cycle_rule!r}")

    owner = {endowment.item_of(j): j for j in range(inst.n)}
    active = set(range(inst.n))
    assign: list = [None] * inst.n
    while active:
        held = {endowment.item_of(j) for j in active}
        points = {}
        for j in active:
            best = next(inst.alt(j, r) for r in range(1, inst.m + 1) if inst.alt(j, r) in held)
            points[j] = owner[best]
        start = min(active) if cycle_rule == "lowest" else max(active)
        path, seen = [start], {start: 0}
        while True:
            nxt = points[path[-1]]
            if nxt in seen:
                cycle = path[seen[nxt] :]
                break
            seen[nxt] = len(path)
            path.append(nxt)
        for j in cycle:
            assign[j] = endowment.item_of(points[j])
        active.difference_update(cycle)
    return Matching(tuple(assign))


@dataclass(frozen=True)
class FractionalMatching:
    """Doubly stochastic x[j][i-1] = probability agent j receives item i."""

    x: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.x)
        if any(len(row) != n for row in self.x):
            raise DomainError("fractional matching must be square")
        for row in self.x:
            if any(v < 0 for v in row) or sum(row, Fraction(0)) != 1:
                raise DomainError("rows must be non-negative and sum to 1")
        for i in range(n):
            if sum((row[i] for row in self.x), Fraction(0)) != 1:
                raise DomainError("columns must sum to 1")

    @property
    def n(self) -> int:
        return len(self.x)

    def prob(self, agent: int, item: int) -> Fraction:
        return self.x[agent][item - 1]


def ps(inst: MatchingInstance) -> FractionalMatching:
    """Probabilistic serial: simultaneous eating at unit rates, exact arithmetic.

    Event-driven rounds; several items exhausting at the same rational moment
    are all retired within the round (rates only change at round boundaries).
    """
    if inst.n != inst.m:
        raise DomainError("probabilistic serial needs n == m")
    n = inst.n
    x = [[Fraction(0)] * n for _ in range(n)]
    eaten = {i: Fraction(0) for i in inst.items}
    available = set(inst.items)
    while available:
        pointing = {}
        for j in range(n):
            best = next(inst.alt(j, r) for r in range(1, n + 1) if inst.alt(j, r) in available)
            pointing[j] = best
        eaters: dict = {}
        for j, i in pointing.items():
            eaters.setdefault(i, []).append(j)
        dt = min((1 - eaten[i]) / len(js) for i, js in eaters.items())
        for i, js in eaters.items():
            for j in js:
                x[j][i - 1] += dt
            eaten[i] += len(js) * dt
            if eaten[i] == 1:
                available.discard(i)
    return FractionalMatching(tuple(tuple(row) for row in x))


def bvn_decompose(fm: FractionalMatching) -> Lottery:
    """Birkhoff-von Neumann: exact lottery over perfect matchings recomposing fm.

    Greedy peeling: find a perfect matching on the residual support, subtract
    the minimum entry along it (which zeroes at least one cell), repeat.  The
    subtracted coefficients are the lottery weights and sum to exactly 1.
    """
    n = fm.n
    residual = [list(row) for row in fm.x]
    parts: list[tuple[Matching, Fraction]] = []
    for _ in range(n * n + 1):
        if all(v == 0 for row in residual for v in row):
            break
        adjacency = [[i for i in range(n) if residual[j][i] > 0] for j in range(n)]
        size, match_l = hopcroft_karp(adjacency, n)
        if size != n:
            raise StructuralError("support of a doubly stochastic matrix lost its perfect matching")
        lam = min(residual[j][match_l[j]] for j in range(n))
        parts.append((Matching(tuple(match_l[j] + 1 for j in range(n))), lam))
        for j in range(n):
            residual[j][match_l[j]] -= lam
    else:
        raise StructuralError("Birkhoff decomposition did not terminate")
    return Lottery(parts)


def fractional_from_lottery(lottery: Lottery, n: int) -> FractionalMatching:
    """Per-(agent, item) marginals of a lottery over perfect matchings."""
    x = [[Fraction(0)] * n for _ in range(n)]
    for matching, w in lottery.items():
        for j, i in matching.pairs():
            x[j][i - 1] += w
    return FractionalMatching(tuple(tuple(row) for row in x))


# ---------------------------------------------------------------------------
# Hooks for the truthfulness machinery
# ---------------------------------------------------------------------------


def matching_domain(n: int, m: int) -> tuple:
    items = tuple(range(1, m + 1))
    return tuple(tuple(itertools.permutations(items)) for _ in range(n))


def _matching_outcome_label(outcome: Matching, agent: int):
    return outcome.item_of(agent)


def maxmatch_scf(n: int, m: int) -> SocialChoiceFunction:
    """MaxMatch as an SCF over the full strict domain, expressed per-agent by items."""

    def ev(profile) -> Matching:
        return max_match(MatchingInstance.from_lists([list(p) for p in profile], m))

    return SocialChoiceFunction(
        matching_domain(n, m),
        ev,
        outcome_label=_matching_outcome_label,
        representative=lambda a, pref, r: singleton_matching(n, a, pref[r - 1]),
    )


def ps_mechanism(n: int, m: int) -> MechanismUnderTest:
    """PS as an exact lottery-over-matchings mechanism (via BvN decomposition)."""

    def ev(profile) -> Lottery:
        inst = MatchingInstance.from_lists([list(p) for p in profile], m)
        return bvn_decompose(ps(inst))

    return MechanismUnderTest(matching_domain(n, m), ev, outcome_label=_matching_outcome_label)


def rsd_mechanism(n: int, m: int) -> MechanismUnderTest:
    def ev(profile) -> Lottery:
        return rsd(MatchingInstance.from_lists([list(p) for p in profile], m))

    return MechanismUnderTest(matching_domain(n, m), ev, outcome_label=_matching_outcome_label)
