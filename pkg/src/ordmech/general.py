"""General ordinal settings: every universe element is a feasible outcome.

``randrank`` buckets positions whose benchmark maxrank_r stays within a factor
2 of the bucket opener's, then mixes the argmax outcomes of the bucket openers
uniformly -- an exact lottery whose expected rank_r is at least maxrank_r / 2k
with k <= ceil(log2 n) buckets.  ``best_factor_lottery`` computes, by exact LP,
the best guaranteed fraction any lottery can achieve on a given instance, which
is how the matching lower-bound instances certify that O(log n) is tight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import inf
from typing import Sequence

from .errors import DomainError
from .lp import RationalLP
from .prefs import Lottery, StrictProfile, histogram, maxranks_general, rank_of
from .verify import SocialChoiceFunction


@dataclass(frozen=True)
class GeneralInstance:
    """A strict profile over an explicit finite outcome set."""

    profile: StrictProfile

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence], outcomes: Sequence | None = None) -> "GeneralInstance":
        if outcomes is None:
            m = len(lists[0]) if lists else 0
            outcomes = tuple(range(1, m + 1))
        return cls(StrictProfile(tuple(outcomes), tuple(tuple(l) for l in lists)))

    @property
    def n(self) -> int:
        return self.profile.n_agents

    @property
    def m(self) -> int:
        return self.profile.m

    @property
    def outcomes(self) -> tuple:
        return self.profile.universe

    def maxranks(self) -> list[int]:
        return maxranks_general(self.profile)


@dataclass(frozen=True)
class RandrankResult:
    lottery: Lottery
    boundaries: tuple[int, ...]  # bucket-opening ranks r_1 = 1 < r_2 < ...
    picks: tuple  # argmax outcome per bucket opener
    k: int


def randrank(inst: GeneralInstance) -> RandrankResult:
    """Uniform mixture over bucket-opener argmax outcomes.

    Bucket openers: r_1 = 1, then the first r whose maxrank exceeds twice the
    current opener's.  Since the benchmark at least doubles per bucket, there
    are at most ceil(log2 n) buckets (n >= 2), giving E[rank_r] >= maxrank_r/2k.
    Argmax ties break by outcome order in the universe.
    """
    if inst.n < 1:
        raise DomainError("need at least one agent")
    maxranks = inst.maxranks()
    boundaries = [1]
    while True:
        opener = maxranks[boundaries[-1] - 1]
        nxt = next(
            (r for r in range(boundaries[-1] + 1, inst.m + 1) if maxranks[r - 1] > 2 * opener),
            None,
        )
        if nxt is None:
            break
        boundaries.append(nxt)
    picks = tuple(
        next(o for o in inst.outcomes if rank_of(o, inst.profile, r) == maxranks[r - 1])
        for r in boundaries
    )
    k = len(boundaries)
    lottery = Lottery((o, Fraction(1, k)) for o in picks)
    return RandrankResult(lottery, tuple(boundaries), picks, k)


def plurality(inst: GeneralInstance):
    """Outcome with the most first places; ties break by universe order."""
    return max(
        inst.outcomes,
        key=lambda o: (rank_of(o, inst.profile, 1), -inst.outcomes.index(o)),
    )


def plurality_top_choice_rule(outcomes: Sequence):
    """Plurality as a pure function of the agents' top choices."""
    order = {o: t for t, o in enumerate(outcomes)}

    def g(tops: tuple):
        counts: dict = {}
        for o in tops:
            counts[o] = counts.get(o, 0) + 1
        return max(counts, key=lambda o: (counts[o], -order[o]))

    return g


def plurality_scf(outcomes: Sequence, n: int) -> SocialChoiceFunction:
    g = plurality_top_choice_rule(outcomes)
    domain = tuple(tuple(itertools.permutations(tuple(outcomes))) for _ in range(n))
    return SocialChoiceFunction(domain, lambda profile: g(tuple(pl[0] for pl in profile)))


def dictator_scf(outcomes: Sequence, n: int, agent: int = 0) -> SocialChoiceFunction:
    domain = tuple(tuple(itertools.permutations(tuple(outcomes))) for _ in range(n))
    return SocialChoiceFunction(domain, lambda profile: profile[agent][0])


def gen_det_lb(n: int) -> GeneralInstance:
    """n agents, n+1 outcomes: distinct tops 1..n, shared second choice n+1.

    Every single outcome has factor >= min(n, m-1) = n here: picking the shared
    second choice zeroes rank_1, picking any top leaves rank_2 at one while the
    shared outcome reaches n.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    m = n + 1
    lists = []
    for j in range(1, n + 1):
        prefix = [j, m]
        lists.append(prefix + [o for o in range(1, m + 1) if o not in prefix])
    return GeneralInstance.from_lists(lists)


def gen_randrank_lb(k: int) -> GeneralInstance:
    """Doubling-group instance: maxrank_r = 2^r for r in 1..k, near-flat elsewhere.

    Agent groups A_l of size 2^l share the special outcome o_l at position l;
    the rest of each agent's top-k is private filler, so any lottery must
    spread mass across k incomparable scales, losing a k/3 fraction somewhere.
    """
    if k < 2:
        raise DomainError("need k >= 2 for a non-degenerate instance")
    n = 2 ** (k + 1) - 2
    m = (k - 1) * n + k
    outcomes = tuple(range(1, m + 1))  # 1..k special, then filler blocks of k-1 per agent
    lists = []
    agent = 0
    for ell in range(1, k + 1):
        for _ in range(2**ell):
            filler = [k + agent * (k - 1) + t for t in range(1, k)]
            prefix: list[int] = []
            fill_iter = iter(filler)
            for r in range(1, k + 1):
                prefix.append(ell if r == ell else next(fill_iter))
            lists.append(prefix + [o for o in range(1, m + 1) if o not in set(prefix)])
            agent += 1
    return GeneralInstance.from_lists(lists, outcomes)


@dataclass(frozen=True)
class BestFactor:
    """Best guaranteed fraction alpha (and its factor 1/alpha) over all lotteries."""

    fraction: Fraction
    factor: Fraction | float
    weights: dict


def best_factor_lottery(inst: GeneralInstance) -> BestFactor:
    """Exact LP: maximize alpha s.t. some lottery has E[rank_r] >= alpha * maxrank_r for all r.

    The optimum is reported in the *fraction* convention (1 = optimal); its
    reciprocal is the factor convention used by rank_approx_factor.
    """
    maxranks = inst.maxranks()
    lp = RationalLP()
    for o in inst.outcomes:
        lp.add_variable(("p", o), 0, 1)
    lp.add_variable("alpha", 0, 1)
    lp.add_constraint({("p", o): 1 for o in inst.outcomes}, "==", 1)
    hists = {o: histogram(o, inst.profile).counts for o in inst.outcomes}
    for r in range(1, inst.m + 1):
        if maxranks[r - 1] == 0:
            continue
        row = {("p", o): hists[o][r - 1] for o in inst.outcomes}
        row["alpha"] = -maxranks[r - 1]
        lp.add_constraint(row, ">=", 0)
    lp.set_objective("max", {"alpha": 1})
    sol = lp.solve()
    if sol.status != "optimal":
        raise DomainError(f"best-fraction LP came back {sol.status}")
    alpha = sol.objective_value
    weights = {o: sol[("p", o)] for o in inst.outcomes if sol[("p", o)] > 0}
    return BestFactor(alpha, (Fraction(1) / alpha) if alpha else inf, weights)


def lottery_fraction(lottery: Lottery, inst: GeneralInstance) -> Fraction:
    """The guaranteed fraction min_r E[rank_r]/maxrank_r of a concrete lottery."""
    maxranks = inst.maxranks()
    expected = [Fraction(0)] * inst.m
    for o, p in lottery.items():
        for i, c in enumerate(histogram(o, inst.profile).counts):
            expected[i] += p * c
    fractions = [
        expected[r - 1] / maxranks[r - 1]
        for r in range(1, inst.m + 1)
        if maxranks[r - 1] > 0
    ]
    return min(fractions, default=Fraction(1))
