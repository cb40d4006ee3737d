"""Small demonstration mechanisms separating the truthfulness classes.

These are the canonical witnesses that the inclusions
universal < strong < lex < weak are all strict:

* ``top_two_unilateral``   - strongly truthful, but provably not a mixture of
  truthful deterministic mechanisms (the classifier tops out at "strong").
* ``lt_wrapper`` of ``absorbing_top_choice_scf`` at eps = 1/3 - lex-truthful
  but not strongly truthful.
* ``weak_only_mechanism``  - weakly truthful but not lex-truthful: reporting
  the favored list bumps the top outcome from 1/3 to 1/2.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from .prefs import Lottery
from .verify import MechanismUnderTest, SocialChoiceFunction


def _full_domain(outcomes: Sequence, n: int) -> tuple:
    return tuple(tuple(itertools.permutations(tuple(outcomes))) for _ in range(n))


def top_two_unilateral(outcomes: Sequence, n: int = 1, agent: int = 0) -> MechanismUnderTest:
    """Half/half over the fixed agent's top two reported outcomes."""

    def ev(profile) -> Lottery:
        pl = profile[agent]
        return Lottery({pl[0]: Fraction(1, 2), pl[1]: Fraction(1, 2)})

    return MechanismUnderTest(_full_domain(outcomes, n), ev)


def weak_only_mechanism(outcomes: Sequence = ("a", "b", "c", "d")) -> MechanismUnderTest:
    """Single-agent, four outcomes: uniform over the reported top three, except
    one favored list gets (1/2, 1/6, 1/6, 1/6)."""
    outcomes = tuple(outcomes)
    if len(outcomes) != 4:
        raise ValueError("this construction needs exactly four outcomes")
    favored = outcomes

    def ev(profile) -> Lottery:
        (pl,) = profile
        if pl == favored:
            return Lottery(
                {
                    pl[0]: Fraction(1, 2),
                    pl[1]: Fraction(1, 6),
                    pl[2]: Fraction(1, 6),
                    pl[3]: Fraction(1, 6),
                }
            )
        return Lottery({pl[0]: Fraction(1, 3), pl[1]: Fraction(1, 3), pl[2]: Fraction(1, 3)})

    return MechanismUnderTest(_full_domain(outcomes, 1), ev)


def absorbing_top_choice_rule(outcomes: Sequence = ("a", "b", "c")):
    """g(a) = a, g(b) = g(c) = c: idempotent under substitution, hence top-choice."""
    a, b, c = tuple(outcomes)
    table = {a: a, b: c, c: c}

    def g(tops: tuple):
        (top,) = tops
        return table[top]

    return g


def absorbing_top_choice_scf(outcomes: Sequence = ("a", "b", "c")) -> SocialChoiceFunction:
    """The single-agent top-choice SCF induced by :func:`absorbing_top_choice_rule`."""
    g = absorbing_top_choice_rule(outcomes)
    return SocialChoiceFunction(
        _full_domain(tuple(outcomes), 1), lambda profile: g((profile[0][0],))
    )


def cyclic_shift_rule(outcomes: Sequence):
    """g = successor of agent 1's top: *not* a top-choice rule (fails idempotence)."""
    outcomes = tuple(outcomes)
    nxt = {o: outcomes[(t + 1) % len(outcomes)] for t, o in enumerate(outcomes)}

    def g(tops: tuple):
        return nxt[tops[0]]

    return g


def constant_scf(outcomes: Sequence, n: int, choice) -> SocialChoiceFunction:
    return SocialChoiceFunction(_full_domain(outcomes, n), lambda profile: choice)
