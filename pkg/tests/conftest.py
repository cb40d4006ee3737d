import random
from fractions import Fraction

import pytest

from ordmech import (
    GeneralInstance,
    MatchingInstance,
    MatroidMarket,
    PartitionMatroid,
    ScoringVector,
    SchedulingInstance,
    UniformMatroid,
)
from ordmech.matroid import ExplicitMatroid


def rand_lists(rng: random.Random, n: int, m: int) -> list[list[int]]:
    items = list(range(1, m + 1))
    lists = []
    for _ in range(n):
        perm = items[:]
        rng.shuffle(perm)
        lists.append(perm)
    return lists


def rand_matching(rng: random.Random, n: int, m: int) -> MatchingInstance:
    return MatchingInstance.from_lists(rand_lists(rng, n, m), m)


def rand_general(rng: random.Random, n: int, m: int) -> GeneralInstance:
    return GeneralInstance.from_lists(rand_lists(rng, n, m))


def rand_matroid(rng: random.Random, n: int):
    kind = rng.choice(["uniform", "partition", "explicit"])
    if kind == "uniform":
        return UniformMatroid(rng.randint(1, n))
    groups = tuple(rng.randint(0, 2) for _ in range(n))
    caps = tuple((g, rng.randint(1, 2)) for g in range(3))
    if kind == "partition":
        return PartitionMatroid(groups, caps)
    # explicit: materialize a truncated partition matroid (truncation preserves
    # the axioms), then re-validate exhaustively inside ExplicitMatroid
    trunc = rng.randint(1, n)
    base = PartitionMatroid(groups, caps)
    ground = range(n)
    independent = [
        s
        for size in range(0, trunc + 1)
        for s in _combos(list(ground), size)
        if base.is_independent(s)
    ]
    return ExplicitMatroid(ground, independent)


def _combos(pool, size):
    import itertools

    return itertools.combinations(pool, size)


def rand_matroid_market(rng: random.Random, n: int, m: int) -> MatroidMarket:
    return MatroidMarket.from_lists(
        rand_lists(rng, n, m), [rand_matroid(rng, n) for _ in range(m)]
    )


def rand_parallel(rng: random.Random, n: int, m: int, T: int = 12) -> SchedulingInstance:
    sizes = [Fraction(rng.randint(1, 2 * T)) for _ in range(n)]  # some exceed T: dropped
    return SchedulingInstance.parallel(T, sizes, rand_lists(rng, n, m))


def rand_unrelated(rng: random.Random, n: int, m: int, T: int = 12) -> SchedulingInstance:
    import math

    rows = []
    for _ in range(n):
        rows.append(
            [
                math.inf if rng.random() < 0.15 else Fraction(rng.randint(1, T + 3))
                for _ in range(m)
            ]
        )
    return SchedulingInstance.build(T, rows, rand_lists(rng, n, m))


def rand_scoring(rng: random.Random, m: int) -> ScoringVector:
    steps = [rng.randint(0, 4) for _ in range(m)]
    scores = []
    total = sum(steps)
    for s in steps:
        scores.append(Fraction(total))
        total -= s
    return ScoringVector(tuple(scores))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)
