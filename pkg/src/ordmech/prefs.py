"""Preference profiles, lotteries, rank histograms, and the rank-approximation metric.

Everything here is exact: probabilities and approximation factors are
`fractions.Fraction`, never floats, so downstream truthfulness verifiers can
compare lotteries for *equality*.

The central quantity is ``rank_i(o)``: the number of agents that place outcome
``o`` within their top ``i`` choices.  An outcome (or lottery of outcomes) is an
``alpha``-rank-approximation when, for every position ``i``, its (expected)
``rank_i`` is at least ``maxrank_i / alpha``, where ``maxrank_i`` is the best
``rank_i`` achievable by any single feasible outcome.  ``maxrank`` oracles are
market specific and live with the market modules; this module only consumes
their output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import DomainError

Outcome = Hashable
Rational = Union[int, Fraction]


@dataclass(frozen=True)
class StrictProfile:
    """Per-agent strict complete rankings over a common universe.

    ``lists[j][r-1]`` is agent ``j``'s ``r``-th ranked element.  Each list must
    be a permutation of ``universe``.
    """

    universe: tuple[Outcome, ...]
    lists: tuple[tuple[Outcome, ...], ...]
    _pos: tuple[dict, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        uni = set(self.universe)
        if len(uni) != len(self.universe):
            raise DomainError("universe has duplicate outcomes")
        pos_maps = []
        for j, lst in enumerate(self.lists):
            if set(lst) != uni or len(lst) != len(self.universe):
                raise DomainError(f"agent {j}'s list is not a permutation of the universe")
            pos_maps.append({o: r + 1 for r, o in enumerate(lst)})
        object.__setattr__(self, "_pos", tuple(pos_maps))

    @property
    def n_agents(self) -> int:
        return len(self.lists)

    @property
    def m(self) -> int:
        return len(self.universe)

    def pos(self, agent: int, outcome: Outcome) -> int:
        """1-based rank of ``outcome`` in agent's list."""
        try:
            return self._pos[agent][outcome]
        except KeyError:
            raise DomainError(f"unknown outcome {outcome!r}") from None

    def alt(self, agent: int, rank: int) -> Outcome:
        """Outcome at 1-based ``rank`` in agent's list."""
        if not 1 <= rank <= self.m:
            raise DomainError(f"rank {rank} out of range 1..{self.m}")
        return self.lists[agent][rank - 1]


@dataclass(frozen=True)
class IndiffProfile:
    """Per-agent ordered partitions of the universe into indifference classes.

    ``classes[j]`` lists agent ``j``'s classes best-first; ``representatives[j][r-1]``
    is a designated member of the ``r``-th class (defaults to its first element).
    """

    universe: tuple[Outcome, ...]
    classes: tuple[tuple[tuple[Outcome, ...], ...], ...]
    representatives: tuple[tuple[Outcome, ...], ...] = ()

    def __post_init__(self):
        uni = set(self.universe)
        for j, parts in enumerate(self.classes):
            seen: set = set()
            for part in parts:
                if not part:
                    raise DomainError(f"agent {j} has an empty indifference class")
                seen.update(part)
            if seen != uni or sum(len(p) for p in parts) != len(self.universe):
                raise DomainError(f"agent {j}'s classes do not partition the universe")
        if not self.representatives:
            object.__setattr__(
                self,
                "representatives",
                tuple(tuple(part[0] for part in parts) for parts in self.classes),
            )
        for j, reps in enumerate(self.representatives):
            for r, rep in enumerate(reps):
                if rep not in self.classes[j][r]:
                    raise DomainError(f"representative {rep!r} not in agent {j}'s class {r + 1}")

    @property
    def n_agents(self) -> int:
        return len(self.classes)

    @property
    def m(self) -> int:
        """Histogram length: the largest per-agent class count."""
        return max(len(parts) for parts in self.classes)

    def n_classes(self, agent: int) -> int:
        return len(self.classes[agent])

    def pos(self, agent: int, outcome: Outcome) -> int:
        """1-based index of the class containing ``outcome``."""
        for r, part in enumerate(self.classes[agent], start=1):
            if outcome in part:
                return r
        raise DomainError(f"unknown outcome {outcome!r}")

    def alt(self, agent: int, rank: int) -> tuple[Outcome, ...]:
        if not 1 <= rank <= self.n_classes(agent):
            raise DomainError(f"class rank {rank} out of range")
        return self.classes[agent][rank - 1]

    def representative(self, agent: int, rank: int) -> Outcome:
        return self.representatives[agent][rank - 1]


Profile = Union[StrictProfile, IndiffProfile]


class Lottery:
    """Exact probability distribution over hashable outcomes.

    Zero-probability entries are dropped, so two lotteries are equal iff they
    assign identical probabilities to identical supports.
    """

    __slots__ = ("_probs",)

    def __init__(self, probs: Mapping[Outcome, Rational] | Iterable[tuple[Outcome, Rational]]):
        items = probs.items() if isinstance(probs, Mapping) else probs
        acc: dict = {}
        for outcome, p in items:
            p = Fraction(p)
            if p < 0:
                raise DomainError(f"negative probability {p} for {outcome!r}")
            if p:
                acc[outcome] = acc.get(outcome, Fraction(0)) + p
        if sum(acc.values(), Fraction(0)) != 1:
            raise DomainError("probabilities must sum to exactly 1")
        self._probs = acc

    @classmethod
    def point(cls, outcome: Outcome) -> "Lottery":
        return cls({outcome: Fraction(1)})

    @classmethod
    def mix(cls, parts: Iterable[tuple[Rational, "Lottery"]]) -> "Lottery":
        """Convex combination of lotteries; weights must sum to 1."""
        acc: dict = {}
        for w, lot in parts:
            w = Fraction(w)
            for o, p in lot.items():
                acc[o] = acc.get(o, Fraction(0)) + w * p
        return cls(acc)

    def prob(self, outcome: Outcome) -> Fraction:
        return self._probs.get(outcome, Fraction(0))

    def support(self) -> tuple[Outcome, ...]:
        return tuple(self._probs)

    def items(self) -> Iterator[tuple[Outcome, Fraction]]:
        return iter(self._probs.items())

    def map(self, fn) -> "Lottery":
        """Push-forward along ``fn`` (merges collisions)."""
        return Lottery((fn(o), p) for o, p in self.items())

    def __len__(self) -> int:
        return len(self._probs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Lottery) and self._probs == other._probs

    def __hash__(self):
        return hash(frozenset(self._probs.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{o!r}: {p}" for o, p in sorted(self._probs.items(), key=repr))
        return f"Lottery({{{inner}}})"


@dataclass(frozen=True)
class RankHistogram:
    """Cumulative per-position counts ``counts[i-1] = rank_i(o)``; non-decreasing."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise DomainError("histogram counts must be non-negative")
        if any(a > b for a, b in zip(self.counts, self.counts[1:])):
            raise DomainError("histogram counts must be non-decreasing")

    def __len__(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class ScoringVector:
    """Non-increasing, non-negative position scores shared by all agents."""

    scores: tuple[Fraction, ...]

    def __post_init__(self):
        scores = tuple(Fraction(s) for s in self.scores)
        object.__setattr__(self, "scores", scores)
        if any(s < 0 for s in scores):
            raise DomainError("scores must be non-negative")
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise DomainError("scores must be non-increasing")

    @classmethod
    def borda(cls, m: int) -> "ScoringVector":
        """Scores m-1, m-2, ..., 0."""
        return cls(tuple(Fraction(m - k) for k in range(1, m + 1)))

    @classmethod
    def plurality(cls, m: int) -> "ScoringVector":
        """Indicator of the top position."""
        return cls((Fraction(1),) + (Fraction(0),) * (m - 1))

    def __len__(self) -> int:
        return len(self.scores)


def rank_of(outcome: Outcome, profile: Profile, i: int) -> int:
    """Number of agents ranking ``outcome`` within their top ``i`` positions.

    For an :class:`IndiffProfile`, positions are class indices, so ``i`` counts
    indifference classes rather than single outcomes.
    """
    if i < 1:
        raise DomainError(f"position {i} must be >= 1")
    return sum(1 for j in range(profile.n_agents) if profile.pos(j, outcome) <= i)


def histogram(outcome: Outcome, profile: Profile) -> RankHistogram:
    """The vector ``(rank_1(o), ..., rank_M(o))`` with ``M`` the histogram length."""
    m = profile.m
    positions = [profile.pos(j, outcome) for j in range(profile.n_agents)]
    counts = tuple(sum(1 for p in positions if p <= i) for i in range(1, m + 1))
    return RankHistogram(counts)


HistogramMixture = Union[
    RankHistogram,
    Sequence[Rational],
    Iterable[tuple[Rational, RankHistogram]],
]


def expected_histogram(candidate: HistogramMixture) -> tuple[Fraction, ...]:
    """Exact per-position expectation.

    Accepts a single :class:`RankHistogram`, an iterable of
    ``(weight, RankHistogram)`` pairs (weights summing to 1), or an
    already-averaged sequence of per-position counts.
    """
    if isinstance(candidate, RankHistogram):
        return tuple(Fraction(c) for c in candidate.counts)
    candidate = list(candidate)
    if candidate and not isinstance(candidate[0], (tuple, list)):
        return tuple(Fraction(c) for c in candidate)
    acc: list[Fraction] | None = None
    total = Fraction(0)
    for w, hist in candidate:
        w = Fraction(w)
        total += w
        if acc is None:
            acc = [w * c for c in hist.counts]
        else:
            if len(hist.counts) != len(acc):
                raise DomainError("histogram length mismatch in mixture")
            for i, c in enumerate(hist.counts):
                acc[i] += w * c
    if acc is None or total != 1:
        raise DomainError("mixture weights must be non-empty and sum to exactly 1")
    return tuple(acc)


def rank_approx_factor(candidate: HistogramMixture, maxranks: Sequence[int]):
    """Worst-position ratio ``maxrank_i / E[rank_i]``.

    Returns an exact ``Fraction`` (>= 1 against a true maxrank oracle), or
    ``math.inf`` when some position with positive maxrank gets zero expected
    count.  Positions with ``maxrank_i == 0`` are treated as satisfied.
    """
    expected = expected_histogram(candidate)
    if len(expected) != len(maxranks):
        raise DomainError(f"length mismatch: {len(expected)} counts vs {len(maxranks)} maxranks")
    factor = Fraction(1)
    for e, tgt in zip(expected, maxranks):
        if tgt <= 0:
            continue
        if e == 0:
            return inf
        factor = max(factor, Fraction(tgt) / e)
    return factor


def scoring_welfare(outcome: Outcome, profile: Profile, sv: ScoringVector) -> Fraction:
    """Total score ``sum_j sv[pos_j(outcome)]``.

    Agents whose class position exceeds ``len(sv)`` contribute zero; this is how
    allocation markets score their "unassigned" class.
    """
    total = Fraction(0)
    for j in range(profile.n_agents):
        p = profile.pos(j, outcome)
        if p <= len(sv):
            total += sv.scores[p - 1]
    return total


def welfare_from_histogram(counts: Sequence[Rational], sv: ScoringVector) -> Fraction:
    """Scoring welfare via the telescoping identity ``sum_i (U(i)-U(i+1)) rank_i``."""
    if len(counts) != len(sv):
        raise DomainError("histogram/scoring-vector length mismatch")
    scores = sv.scores + (Fraction(0),)
    return sum(
        ((scores[i] - scores[i + 1]) * Fraction(c) for i, c in enumerate(counts)),
        Fraction(0),
    )


def check_homutil(
    candidate: HistogramMixture,
    maxranks: Sequence[int],
    sv: ScoringVector,
    best_welfare: Rational | None = None,
) -> bool:
    """True iff expected scoring welfare is >= (1/alpha) * best outcome welfare.

    ``alpha`` is the candidate's own rank-approximation factor against
    ``maxranks``.  Pass ``best_welfare`` from an exact welfare-maximization
    oracle; when omitted, the (larger) upper bound built from ``maxranks``
    stands in, which makes the check strictly harder to pass.
    """
    expected = expected_histogram(candidate)
    alpha = rank_approx_factor(candidate, maxranks)
    if best_welfare is None:
        best_welfare = welfare_from_histogram([Fraction(t) for t in maxranks], sv)
    best_welfare = Fraction(best_welfare)
    got = welfare_from_histogram(expected, sv)
    if alpha == inf:
        return best_welfare == 0 or got >= 0  # 1/alpha == 0: any non-negative welfare passes
    return alpha * got >= best_welfare


def maxranks_general(profile: Profile) -> list[int]:
    """``maxrank_i = max_o rank_i(o)`` by full enumeration of the outcome universe.

    This is the maxrank oracle for the general ordinal setting, where every
    universe element is a feasible outcome.  Structured markets (matching,
    matroid, scheduling) have their own oracles over *feasible* outcomes.
    """
    m = profile.m
    best = [0] * m
    for o in profile.universe:
        h = histogram(o, profile)
        for i, c in enumerate(h.counts):
            if c > best[i]:
                best[i] = c
    return best


def all_strict_profiles(n: int, universe: Sequence[Outcome]) -> Iterator[StrictProfile]:
    """Every strict profile of ``n`` agents over ``universe`` (m!^n of them)."""
    perms = list(itertools.permutations(universe))
    for lists in itertools.product(perms, repeat=n):
        yield StrictProfile(tuple(universe), lists)
