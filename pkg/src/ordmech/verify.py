"""Dominance relations, truthfulness classes, pseudomonotonicity, and the epsilon-lottery wrapper.

A randomized mechanism maps preference profiles to exact lotteries.  Three
truthfulness notions are checked by exhaustive deviation enumeration over an
explicit finite domain:

* strong  - the truthful lottery stochastically dominates every misreport;
* lex     - the truthful lottery equals or lexicographically dominates every
            misreport (lex-dominance is a total order);
* weak    - no misreport strictly stochastically dominates the truthful lottery.

``strong => lex => weak``.  Universal truthfulness (mixture-of-truthful-
deterministic) sits above "strong" but is not searched for here, so
classification tops out at "strong".

For deterministic social choice functions, *pseudomonotonicity* characterizes
which functions admit lex-truthful mechanisms agreeing with them with
probability 1 - eps for every eps: ``lt_wrapper`` builds that mechanism by
mixing the function's outcome with a rank-indexed perturbation lottery.

Agents may be indifferent between outcomes (two matchings giving an agent the
same item).  All comparisons therefore run on per-class aggregated probability
vectors of the *deviating* agent; in the strict setting each outcome is its own
class and the aggregation is the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DomainError, ResourceError
from .prefs import Lottery, Outcome

PrefList = tuple
ProfileTuple = tuple  # one PrefList per agent


def _default_class_labels(agent: int, pref: PrefList) -> tuple:
    return tuple(pref)


def _default_outcome_label(outcome, agent: int):
    return outcome


def _default_representative(agent: int, pref: PrefList, rank: int):
    return pref[rank - 1]


@dataclass(frozen=True)
class SocialChoiceFunction:
    """A deterministic map from profiles to outcomes over an explicit finite domain.

    ``class_labels(j, pref)`` lists agent ``j``'s indifference-class labels
    best-first under report ``pref`` (for allocation markets: the items in
    ``pref`` order, with the implicit "unassigned" class last).
    ``outcome_label(o, j)`` names the class an outcome falls in for ``j``.
    ``representative(j, pref, r)`` is the outcome the epsilon-wrapper hands out
    for agent ``j``'s rank-``r`` class.
    """

    domain: tuple[tuple[PrefList, ...], ...]
    eval_fn: Callable[[ProfileTuple], Outcome]
    class_labels: Callable[[int, PrefList], tuple] = _default_class_labels
    outcome_label: Callable[[Outcome, int], object] = _default_outcome_label
    representative: Callable[[int, PrefList, int], Outcome] = _default_representative

    @property
    def n_agents(self) -> int:
        return len(self.domain)

    def __call__(self, profile: ProfileTuple) -> Outcome:
        return self.eval_fn(profile)


@dataclass(frozen=True)
class MechanismUnderTest:
    """A lottery-valued mechanism over an explicit finite domain."""

    domain: tuple[tuple[PrefList, ...], ...]
    eval_fn: Callable[[ProfileTuple], Lottery]
    class_labels: Callable[[int, PrefList], tuple] = _default_class_labels
    outcome_label: Callable[[Outcome, int], object] = _default_outcome_label

    @property
    def n_agents(self) -> int:
        return len(self.domain)

    def __call__(self, profile: ProfileTuple) -> Lottery:
        return self.eval_fn(profile)


@dataclass(frozen=True)
class EpsilonSchedule:
    """Strictly decreasing positive parts summing exactly to ``eps``."""

    eps: Fraction
    parts: tuple[Fraction, ...]

    def __post_init__(self):
        eps = Fraction(self.eps)
        parts = tuple(Fraction(p) for p in self.parts)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "parts", parts)
        if not 0 < eps < 1:
            raise DomainError("eps must lie strictly between 0 and 1")
        if any(p <= 0 for p in parts):
            raise DomainError("all schedule parts must be positive")
        if any(a <= b for a, b in zip(parts, parts[1:])):
            raise DomainError("schedule parts must be strictly decreasing")
        if sum(parts, Fraction(0)) != eps:
            raise DomainError("schedule parts must sum exactly to eps")

    @classmethod
    def proportional(cls, eps, m: int) -> "EpsilonSchedule":
        """Parts eps*(m+1-i)/(1+2+...+m): strict decrease, exact sum, small denominators."""
        eps = Fraction(eps)
        total = m * (m + 1) // 2
        return cls(eps, tuple(eps * Fraction(m + 1 - i, total) for i in range(1, m + 1)))


@dataclass(frozen=True)
class ViolationReport:
    """A replayable witness: re-running the two profiles reproduces the failure."""

    kind: str
    agent: int
    truthful_profile: ProfileTuple
    deviated_profile: ProfileTuple
    detail: tuple

    @property
    def true_list(self) -> PrefList:
        return self.truthful_profile[self.agent]

    @property
    def misreport(self) -> PrefList:
        return self.deviated_profile[self.agent]


# ---------------------------------------------------------------------------
# Dominance
# ---------------------------------------------------------------------------


def _vector(lottery: Lottery, order: Sequence) -> tuple[Fraction, ...]:
    index = {o: i for i, o in enumerate(order)}
    vec = [Fraction(0)] * len(order)
    for o, p in lottery.items():
        if o not in index:
            raise DomainError(f"lottery outcome {o!r} missing from the ranking")
        vec[index[o]] += p
    return tuple(vec)


def lex_dominates_vec(p: Sequence[Fraction], q: Sequence[Fraction]) -> bool:
    """True iff p != q and p is larger at the first coordinate where they differ."""
    if len(p) != len(q):
        raise DomainError("probability vectors have mismatched lengths")
    for a, b in zip(p, q):
        if a != b:
            return a > b
    return False


def stoch_dominates_vec(p: Sequence[Fraction], q: Sequence[Fraction]) -> bool:
    """Weak first-order dominance: every prefix sum of p is >= that of q."""
    if len(p) != len(q):
        raise DomainError("probability vectors have mismatched lengths")
    pa = qa = Fraction(0)
    for a, b in zip(p, q):
        pa += a
        qa += b
        if pa < qa:
            return False
    return True


def lex_dominates(p: Lottery, q: Lottery, order: Sequence) -> bool:
    """Lex-dominance of p over q with outcomes considered in ``order`` (best first)."""
    return lex_dominates_vec(_vector(p, order), _vector(q, order))


def stoch_dominates(p: Lottery, q: Lottery, order: Sequence) -> bool:
    return stoch_dominates_vec(_vector(p, order), _vector(q, order))


def aggregate_by_classes(
    lottery: Lottery,
    agent: int,
    pref: PrefList,
    class_labels: Callable[[int, PrefList], tuple],
    outcome_label: Callable[[Outcome, int], object],
) -> tuple[Fraction, ...]:
    """Per-class probabilities in ``pref`` order, with any residual mass
    (outcomes outside the listed classes, e.g. "agent unassigned") appended last."""
    labels = class_labels(agent, pref)
    index = {lab: i for i, lab in enumerate(labels)}
    vec = [Fraction(0)] * (len(labels) + 1)
    for o, p in lottery.items():
        vec[index.get(outcome_label(o, agent), len(labels))] += p
    return tuple(vec)


# ---------------------------------------------------------------------------
# Deviation enumeration
# ---------------------------------------------------------------------------


def _deviations(domain, max_checks: int):
    """Yield (profile, agent, deviated_profile); guard the total enumeration size."""
    n_profiles = 1
    for lists in domain:
        n_profiles *= len(lists)
    total = n_profiles * sum(len(lists) - 1 for lists in domain)
    if total > max_checks:
        raise ResourceError(f"deviation space has {total} checks, above the cap {max_checks}")
    for profile in itertools.product(*domain):
        for j, alternatives in enumerate(domain):
            for alt in alternatives:
                if alt == profile[j]:
                    continue
                deviated = profile[:j] + (alt,) + profile[j + 1 :]
                yield profile, j, deviated


@dataclass(frozen=True)
class TruthfulnessResult:
    label: str  # "strong" | "lex" | "weak" | "none"
    strong_violation: ViolationReport | None
    lex_violation: ViolationReport | None
    weak_violation: ViolationReport | None


_ORDERED_LABELS = ("strong", "lex", "weak", "none")


def classify_truthfulness(mech: MechanismUnderTest, max_checks: int = 2_000_000) -> TruthfulnessResult:
    """Strongest truthfulness class holding over the whole domain.

    Universal truthfulness would require exhibiting a mixture decomposition, so
    the strongest reported class is "strong".  Lotteries are compared on the
    deviating agent's aggregated class-probability vectors.
    """
    cache: dict = {}

    def lot(profile: ProfileTuple) -> Lottery:
        if profile not in cache:
            cache[profile] = mech.eval_fn(profile)
        return cache[profile]

    strong = lex = weak = None
    for profile, j, deviated in _deviations(mech.domain, max_checks):
        pv = aggregate_by_classes(lot(profile), j, profile[j], mech.class_labels, mech.outcome_label)
        qv = aggregate_by_classes(lot(deviated), j, profile[j], mech.class_labels, mech.outcome_label)
        if strong is None and not stoch_dominates_vec(pv, qv):
            strong = ViolationReport("strong", j, profile, deviated, (pv, qv))
        if lex is None and pv != qv and not lex_dominates_vec(pv, qv):
            lex = ViolationReport("lex", j, profile, deviated, (pv, qv))
        if weak is None and qv != pv and stoch_dominates_vec(qv, pv):
            weak = ViolationReport("weak", j, profile, deviated, (pv, qv))
    label = "strong" if strong is None else "lex" if lex is None else "weak" if weak is None else "none"
    return TruthfulnessResult(label, strong, lex, weak)


def is_pseudomonotone(scf: SocialChoiceFunction, max_checks: int = 2_000_000):
    """Exhaustively test pseudomonotonicity; returns ``(bool, witness_or_None)``.

    For every unilateral deviation with outcomes ``o = f(truth)`` and
    ``o' = f(misreport)``, either ``o`` is weakly preferred to ``o'`` by the
    deviator, or some class strictly better than ``o'`` was demoted by the
    misreport (its true position is strictly smaller than its reported one).
    """
    cache: dict = {}

    def ev(profile: ProfileTuple):
        if profile not in cache:
            cache[profile] = scf.eval_fn(profile)
        return cache[profile]

    for profile, j, deviated in _deviations(scf.domain, max_checks):
        labels_true = scf.class_labels(j, profile[j])
        pos_true = {lab: r for r, lab in enumerate(labels_true, start=1)}
        unranked = len(labels_true) + 1
        p1 = pos_true.get(scf.outcome_label(ev(profile), j), unranked)
        p2 = pos_true.get(scf.outcome_label(ev(deviated), j), unranked)
        if p1 <= p2:
            continue
        labels_dev = scf.class_labels(j, deviated[j])
        pos_dev = {lab: r for r, lab in enumerate(labels_dev, start=1)}
        demoted = any(
            pos_true[lab] < p2 and pos_true[lab] < pos_dev.get(lab, unranked)
            for lab in labels_true
        )
        if not demoted:
            report = ViolationReport(
                "pseudomonotone", j, profile, deviated, (ev(profile), ev(deviated))
            )
            return False, report
    return True, None


def lt_wrapper(scf: SocialChoiceFunction, schedule: EpsilonSchedule) -> MechanismUnderTest:
    """Lex-truthful mechanism agreeing with ``scf`` with probability >= 1 - eps.

    Returns ``scf``'s outcome with probability ``1 - eps``; with the remaining
    mass it picks an agent uniformly and hands out that agent's rank-``r``
    class representative with probability ``parts[r-1] / eps``.  Requires the
    underlying function to be pseudomonotone for the lex-truthfulness guarantee
    (callers may pre-verify with :func:`is_pseudomonotone`).
    """
    n = scf.n_agents
    parts = schedule.parts

    def ev(profile: ProfileTuple) -> Lottery:
        weighted: list[tuple[Fraction, Outcome]] = [
            (1 - schedule.eps, scf.eval_fn(profile))
        ]
        for a in range(n):
            ranks = len(scf.class_labels(a, profile[a]))
            if ranks != len(parts):
                raise DomainError(
                    f"schedule has {len(parts)} parts but agent {a} has {ranks} ranked classes"
                )
            for r in range(1, ranks + 1):
                weighted.append((parts[r - 1] / n, scf.representative(a, profile[a], r)))
        return Lottery((o, w) for w, o in weighted)

    return MechanismUnderTest(scf.domain, ev, scf.class_labels, scf.outcome_label)


def is_top_choice_scf(g: Callable[[tuple], Outcome], outcomes: Sequence[Outcome], n: int) -> bool:
    """Substitution-idempotence: if ``g(o, rest) == o'`` then ``g(o', rest) == o'``.

    A profile-level function ``f(profile) = g(tops)`` with this property is a
    top-choice SCF; every such function is pseudomonotone.
    """
    for vec in itertools.product(outcomes, repeat=n):
        out = g(vec)
        for j in range(n):
            substituted = vec[:j] + (out,) + vec[j + 1 :]
            if g(substituted) != out:
                return False
    return True


def scf_from_top_choice(
    g: Callable[[tuple], Outcome], outcomes: Sequence[Outcome], n: int
) -> SocialChoiceFunction:
    """Lift a top-choice rule over ``outcomes`` to an SCF on the full strict domain."""
    domain = tuple(tuple(itertools.permutations(outcomes)) for _ in range(n))
    return SocialChoiceFunction(domain, lambda profile: g(tuple(pl[0] for pl in profile)))
