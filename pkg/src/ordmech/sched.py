"""Scheduling markets: jobs with private machine preferences, public processing times,
and a hard per-machine makespan budget T.

Parallel machines (p depends only on the job) are handled by size-bucketing:
class 0 holds jobs of size at most T/n (plus one designated job so the class is
never empty), class l the jobs in (2^(l-1) T/n, 2^l T/n].  Each class becomes a
matroid market with a per-machine capacity, solved by the staged allocation:

* ``parallel_det``   - concatenates all class schedules: factor 2 per rank,
  makespan O(T log n).
* ``parallel_rand``  - puts weight 1/k on each class schedule's edges and
  decomposes that fractional point over a two-laminar-family polytope into an
  exact lottery of schedules, every one of which has makespan at most 8T and
  at least |N_0| + B_r jobs on top-r machines.

Unrelated machines go through ``rnkcomp``: a prize-collecting assignment LP
solved exactly, rounded on a machine-copy bipartite graph, then one job dropped
from each overloaded machine -- a schedule within makespan T assigning at least
half of maxrank_r.  ``unrelated`` stitches the per-rank schedules together with
a second copy-graph polytope for an O(log n) factor at makespan 3T.

``maxrank_sched`` is the exact benchmark (exhaustive subset DP, desk scale).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, ResourceError, StructuralError
from .lp import ConvexDecomposition, RationalLP, decompose
from .matroid import MatroidMarket, UniformMatroid, matroid_max_match
from .prefs import Lottery, RankHistogram, StrictProfile
from .verify import EpsilonSchedule, MechanismUnderTest

INF = math.inf
MAXRANK_JOB_CAP = 12
MAXRANK_MACHINE_CAP = 5


def _as_time(v):
    return INF if v == INF else Fraction(v)


@dataclass(frozen=True)
class SchedulingInstance:
    """n jobs, m machines, times ``p[j][i-1]`` (Fraction or math.inf), budget T."""

    T: Fraction
    p: tuple[tuple, ...]
    profile: StrictProfile  # strict lists over machines 1..m

    def __post_init__(self):
        object.__setattr__(self, "T", Fraction(self.T))
        object.__setattr__(
            self, "p", tuple(tuple(_as_time(v) for v in row) for row in self.p)
        )
        if self.T <= 0:
            raise DomainError("makespan budget T must be positive")
        if len(self.p) != self.profile.n_agents:
            raise DomainError("one processing-time row per job required")
        for row in self.p:
            if len(row) != self.profile.m:
                raise DomainError("processing-time rows must have one entry per machine")
            if any(v != INF and v <= 0 for v in row):
                raise DomainError("processing times must be positive or infinite")

    @classmethod
    def build(cls, T, p_rows: Sequence[Sequence], lists: Sequence[Sequence[int]]) -> "SchedulingInstance":
        m = len(lists[0]) if lists else (len(p_rows[0]) if p_rows else 0)
        profile = StrictProfile(tuple(range(1, m + 1)), tuple(tuple(l) for l in lists))
        return cls(Fraction(T), tuple(tuple(row) for row in p_rows), profile)

    @classmethod
    def parallel(cls, T, sizes: Sequence, lists: Sequence[Sequence[int]]) -> "SchedulingInstance":
        m = len(lists[0]) if lists else 0
        rows = tuple((Fraction(s),) * m for s in sizes)
        return cls.build(T, rows, lists)

    @property
    def n(self) -> int:
        return self.profile.n_agents

    @property
    def m(self) -> int:
        return self.profile.m

    @property
    def machines(self) -> tuple:
        return self.profile.universe

    def time(self, job: int, machine: int):
        return self.p[job][machine - 1]

    def pos(self, job: int, machine: int) -> int:
        return self.profile.pos(job, machine)

    def alt(self, job: int, rank: int) -> int:
        return self.profile.alt(job, rank)

    @property
    def is_parallel(self) -> bool:
        return all(len(set(row)) == 1 for row in self.p)

    def job_size(self, job: int):
        if not self.is_parallel:
            raise DomainError("job_size is only defined for parallel machines")
        return self.p[job][0]


@dataclass(frozen=True)
class Schedule:
    """Partial assignment ``assign[j] = machine or None``."""

    assign: tuple

    def machine_of(self, job: int):
        return self.assign[job]

    @property
    def assigned(self) -> tuple[int, ...]:
        return tuple(j for j, i in enumerate(self.assign) if i is not None)

    @property
    def size(self) -> int:
        return len(self.assigned)


def empty_schedule(n: int) -> Schedule:
    return Schedule((None,) * n)


def machine_load(schedule: Schedule, inst: SchedulingInstance, machine: int) -> Fraction:
    total = Fraction(0)
    for j, i in enumerate(schedule.assign):
        if i == machine:
            t = inst.time(j, i)
            if t == INF:
                raise DomainError(f"job {j} scheduled on a machine it cannot run on")
            total += t
    return total


def makespan(schedule: Schedule, inst: SchedulingInstance) -> Fraction:
    return max((machine_load(schedule, inst, i) for i in inst.machines), default=Fraction(0))


def sched_histogram(schedule: Schedule, inst: SchedulingInstance, jobs: Iterable[int] | None = None) -> RankHistogram:
    """rank_r of the schedule restricted to ``jobs`` (default: all jobs)."""
    pool = range(inst.n) if jobs is None else jobs
    positions = [
        inst.pos(j, schedule.assign[j]) for j in pool if schedule.assign[j] is not None
    ]
    return RankHistogram(tuple(sum(1 for p in positions if p <= r) for r in range(1, inst.m + 1)))


# ---------------------------------------------------------------------------
# Parallel machines: bucketing + matroid markets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JobClasses:
    """Size classes: n0 (tiny + one designated job), classes[l-1] for l = 1..k."""

    n0: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    k: int
    dropped: tuple[int, ...]
    designated: int | None

    @property
    def schedulable(self) -> tuple[int, ...]:
        return tuple(sorted(self.n0 + tuple(itertools.chain.from_iterable(self.classes))))


def bucketize(inst: SchedulingInstance) -> JobClasses:
    """Partition schedulable jobs by size; jobs with p_j > T are dropped.

    Class 0 takes sizes <= T/n (n = schedulable job count); class l takes
    (2^(l-1) T/n, 2^l T/n] for l = 1..ceil(log2 n).  If class 0 comes out
    empty, the lowest-index schedulable job is moved into it.
    """
    if not inst.is_parallel:
        raise DomainError("bucketize requires parallel machines")
    T = inst.T
    sizes = {j: inst.job_size(j) for j in range(inst.n)}
    schedulable = [j for j in range(inst.n) if sizes[j] <= T]
    dropped = tuple(j for j in range(inst.n) if sizes[j] > T)
    ns = len(schedulable)
    if ns == 0:
        return JobClasses((), (), 0, dropped, None)
    k = (ns - 1).bit_length()  # ceil(log2 ns), 0 when ns == 1
    n0 = [j for j in schedulable if sizes[j] <= Fraction(T, ns)]
    classes: list[list[int]] = [[] for _ in range(k)]
    for j in schedulable:
        if j in n0:
            continue
        ell = next(l for l in range(1, k + 1) if sizes[j] <= (2**l) * T / ns)
        classes[ell - 1].append(j)
    designated = None
    if not n0:
        designated = schedulable[0]
        for cls in classes:
            if designated in cls:
                cls.remove(designated)
                break
        n0 = [designated]
    return JobClasses(tuple(n0), tuple(tuple(c) for c in classes), k, dropped, designated)


def _class_cap(ns: int, ell: int) -> int:
    return -(ns // -(2 ** (ell - 1)))  # ceil(ns / 2^(l-1))


def _class_schedule(inst: SchedulingInstance, jobs: Sequence[int], cap: int) -> dict:
    """Solve one size class as a matroid market with per-machine capacity ``cap``."""
    if not jobs:
        return {}
    lists = [list(inst.profile.lists[j]) for j in jobs]
    market = MatroidMarket.from_lists(lists, [UniformMatroid(cap)] * inst.m)
    alloc = matroid_max_match(market, check_stages=False)
    return {j: alloc.assign[local] for local, j in enumerate(jobs) if alloc.assign[local] is not None}


def parallel_det(inst: SchedulingInstance) -> Schedule:
    """Deterministic parallel-machine schedule: top machines for tiny jobs, one
    capacity-constrained matroid market per size class, all concatenated.

    Per-rank factor 2 against the sum of per-class benchmarks; makespan stays
    within O(T log n) (asserted at the provable 2T(k+1) + 4T).
    """
    jc = bucketize(inst)
    ns = len(jc.schedulable)
    assign: list = [None] * inst.n
    for j in jc.n0:
        assign[j] = inst.alt(j, 1)
    for ell in range(1, jc.k + 1):
        part = _class_schedule(inst, jc.classes[ell - 1], _class_cap(ns, ell))
        for j, i in part.items():
            assign[j] = i
    schedule = Schedule(tuple(assign))
    bound = 2 * inst.T * (jc.k + 1) + 4 * inst.T
    if ns and makespan(schedule, inst) > bound:
        raise StructuralError("parallel_det exceeded its provable makespan bound")
    return schedule


@dataclass(frozen=True)
class ParallelRandResult:
    lottery: Lottery  # over Schedule, exact
    sigma: Schedule  # concatenation of the class schedules (jobs outside class 0)
    classes: JobClasses
    B: tuple[int, ...]
    k: int
    x: dict
    decomposition: ConvexDecomposition | None


def parallel_rand(inst: SchedulingInstance) -> ParallelRandResult:
    """Randomized parallel-machine schedule with probability-1 guarantees.

    Weight 1/k is placed on every edge of the concatenated class schedule
    sigma; that point lies in the polytope with per-(machine, class) caps
    A_{i,l} = ceil(n / (2^(l-1) k)) and per-rank floors
    B_r = floor(rank_r(sigma)/k), whose tight systems come from two laminar
    families, so the point decomposes exactly into integral schedules.  Every
    support schedule has makespan at most 8T and rank_r at least |N_0| + B_r.
    """
    jc = bucketize(inst)
    ns = len(jc.schedulable)
    n0_assign = {j: inst.alt(j, 1) for j in jc.n0}
    sigma_map: dict = {}
    for ell in range(1, jc.k + 1):
        sigma_map.update(_class_schedule(inst, jc.classes[ell - 1], _class_cap(ns, ell)))
    sigma = Schedule(tuple(sigma_map.get(j) for j in range(inst.n)))
    k = jc.k
    B = tuple(
        (sched_histogram(sigma, inst).counts[r - 1] // k) if k else 0
        for r in range(1, inst.m + 1)
    )

    def full_schedule(chosen: Iterable[int]) -> Schedule:
        assign: list = [None] * inst.n
        for j, i in n0_assign.items():
            assign[j] = i
        for j in chosen:
            assign[j] = sigma_map[j]
        return Schedule(tuple(assign))

    if k == 0 or not sigma_map:
        lottery = Lottery.point(full_schedule(()))
        result = ParallelRandResult(lottery, sigma, jc, B, k, {}, None)
    else:
        poly = RationalLP()
        for j in sorted(sigma_map):
            poly.add_variable(j, 0, 1)
        class_of = {j: ell for ell in range(1, k + 1) for j in jc.classes[ell - 1]}
        for i in inst.machines:
            for ell in range(1, k + 1):
                support = [j for j in sigma_map if sigma_map[j] == i and class_of[j] == ell]
                if support:
                    cap = -(ns // -(2 ** (ell - 1) * k))
                    poly.add_constraint({j: 1 for j in support}, "<=", cap)
        for r in range(1, inst.m + 1):
            support = [j for j in sigma_map if inst.pos(j, sigma_map[j]) <= r]
            if support:
                poly.add_constraint({j: 1 for j in support}, ">=", B[r - 1])
        x = {j: Fraction(1, k) for j in sigma_map}
        deco = decompose(x, poly)
        lottery = Lottery(
            (full_schedule([j for j, v in point.items() if v == 1]), w)
            for point, w in zip(deco.points, deco.weights)
        )
        result = ParallelRandResult(lottery, sigma, jc, B, k, x, deco)

    for schedule, _ in result.lottery.items():
        if makespan(schedule, inst) > 8 * inst.T:
            raise StructuralError("a support schedule exceeded makespan 8T")
        counts = sched_histogram(schedule, inst).counts
        if any(counts[r - 1] < len(jc.n0) + B[r - 1] for r in range(1, inst.m + 1)):
            raise StructuralError("a support schedule missed its per-rank floor")
    return result


def parallel_rand_lt(inst: SchedulingInstance, schedule: EpsilonSchedule) -> MechanismUnderTest:
    """Lex-truthful wrapper of the randomized parallel-machine algorithm.

    Tiny jobs are always on their top machines.  With probability
    eps_r / n (per non-tiny job j and rank r) the outcome is the schedule
    where only j runs, on its r-th reported machine; all leftover mass stays
    on the main randomized schedule, keeping its total at least 1 - eps.
    """
    if len(schedule.parts) != inst.m:
        raise DomainError("epsilon schedule needs exactly one part per machine rank")
    jc = bucketize(inst)
    ns = len(jc.schedulable)
    if ns == 0:
        raise DomainError("no schedulable jobs")
    n0 = set(jc.n0)
    outside = [j for j in jc.schedulable if j not in n0]
    domain = tuple(
        tuple(itertools.permutations(inst.machines)) for _ in range(inst.n)
    )

    def ev(profile) -> Lottery:
        local = SchedulingInstance(
            inst.T, inst.p, StrictProfile(inst.machines, tuple(tuple(pl) for pl in profile))
        )
        main = parallel_rand(local).lottery
        w_main = 1 - schedule.eps * Fraction(len(outside), ns)
        parts: list[tuple[Fraction, Lottery]] = [(w_main, main)]
        for j in outside:
            for r in range(1, inst.m + 1):
                assign: list = [None] * inst.n
                for jj in jc.n0:
                    assign[jj] = local.alt(jj, 1)
                assign[j] = local.alt(j, r)
                parts.append(
                    (schedule.parts[r - 1] / ns, Lottery.point(Schedule(tuple(assign))))
                )
        return Lottery.mix(parts)

    return MechanismUnderTest(
        domain, ev, outcome_label=lambda sched, agent: sched.assign[agent]
    )


# ---------------------------------------------------------------------------
# Unrelated machines: prize-collecting LP + rounding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RnkcompResult:
    schedule: Schedule
    count: int
    lp_value: Fraction


def rnkcomp(inst: SchedulingInstance, r: int, jobs: Iterable[int] | None = None) -> RnkcompResult:
    """Schedule within makespan T putting at least maxrank_r(jobs)/2 jobs on top-r machines.

    Solves the prize-collecting assignment LP exactly (one dummy machine per
    job absorbs the unassigned mass), rounds on the machine-copy bipartite
    graph built from the fractional fill, then drops the largest job from
    every machine pushed over T.
    """
    S = sorted(set(range(inst.n) if jobs is None else jobs))
    edges = [
        (j, i)
        for j in S
        for i in inst.machines
        if inst.pos(j, i) <= r and inst.time(j, i) != INF and inst.time(j, i) <= inst.T
    ]
    if not edges:
        return RnkcompResult(empty_schedule(inst.n), 0, Fraction(0))

    lp = RationalLP()
    for e in edges:
        lp.add_variable(("x", e), 0, 1)
    for j in S:
        lp.add_variable(("z", j), 0, 1)
    for j in S:
        row = {("x", (jj, i)): 1 for (jj, i) in edges if jj == j}
        row[("z", j)] = 1
        lp.add_constraint(row, "==", 1)
    for i in inst.machines:
        row = {("x", (j, ii)): inst.time(j, ii) for (j, ii) in edges if ii == i}
        if row:
            lp.add_constraint(row, "<=", inst.T)
    lp.set_objective("max", {("x", e): 1 for e in edges})
    sol = lp.solve()
    if sol.status != "optimal":
        raise StructuralError(f"assignment LP came back {sol.status}")

    # Shmoys-Tardos style rounding: split each machine into copies of unit
    # fractional capacity, filling jobs in non-increasing p order.
    copies: list[tuple[int, int]] = []
    copy_jobs: dict[tuple[int, int], set[int]] = {}
    for i in inst.machines:
        frac = [(j, sol[("x", (j, ii))]) for (j, ii) in edges if ii == i and sol[("x", (j, ii))] > 0]
        frac.sort(key=lambda t: (-inst.time(t[0], i), t[0]))
        c, room = 0, Fraction(1)
        for j, amount in frac:
            while amount > 0:
                take = min(amount, room)
                if take > 0:
                    copy_jobs.setdefault((i, c), set()).add(j)
                amount -= take
                room -= take
                if room == 0:
                    c, room = c + 1, Fraction(1)
        for cc in range(c + 1):
            if (i, cc) in copy_jobs:
                copies.append((i, cc))

    job_index = {j: t for t, j in enumerate(S)}
    copy_index = {cp: t for t, cp in enumerate(copies)}
    adjacency: list[list[int]] = [[] for _ in S]
    for cp, js in copy_jobs.items():
        for j in js:
            adjacency[job_index[j]].append(copy_index[cp])
    from .matching import hopcroft_karp  # local import to avoid a cycle at module load

    _, match = hopcroft_karp(adjacency, len(copies))
    assign: list = [None] * inst.n
    for t, j in enumerate(S):
        if match[t] is not None:
            assign[j] = copies[match[t]][0]

    for i in inst.machines:  # drop rule
        while True:
            load = sum(
                (inst.time(j, i) for j in S if assign[j] == i), Fraction(0)
            )
            if load <= inst.T:
                break
            worst = max((j for j in S if assign[j] == i), key=lambda j: (inst.time(j, i), -j))
            assign[worst] = None

    result = Schedule(tuple(assign))
    if makespan(result, inst) > inst.T:
        raise StructuralError("rounding left a machine above the makespan budget")
    count = result.size
    if 2 * count < sol.objective_value:
        raise StructuralError("rounded schedule lost more than half of the LP value")
    return RnkcompResult(result, count, sol.objective_value)


@dataclass(frozen=True)
class RankBuckets:
    boundaries: tuple[int, ...]  # r_1 < r_2 < ... < r_k
    n_counts: tuple[int, ...]  # n_r for r = 1..m (monotone non-decreasing)
    S_sets: tuple[tuple[int, ...], ...]  # S_{r_l} job sets
    k: int
    q: int | None  # smallest l with n_{r_l} >= 2k, None if all below


@dataclass(frozen=True)
class UnrelatedResult:
    schedule: Schedule
    buckets: RankBuckets | None
    group_size: int | None
    sigma: Schedule | None  # union of the per-bucket schedules on S


def unrelated(inst: SchedulingInstance) -> UnrelatedResult:
    """Unrelated-machines schedule: makespan <= 3T, rank_r within 24k of maxrank_r.

    Per-rank 2-approximations come from ``rnkcomp`` (made monotone by carrying
    the best earlier schedule forward, which keeps each one feasible and within
    its own factor-2 bound).  Ranks are bucketed geometrically by assigned
    count; the bucket schedules are overlaid through a machine-copy polytope
    whose integral point keeps one job per copy group of size k - q + 1.
    """
    m = inst.m
    per_rank: list[RnkcompResult] = []
    best: RnkcompResult | None = None
    for r in range(1, m + 1):
        cand = rnkcomp(inst, r)
        if best is None or cand.count > best.count:
            best = cand
        per_rank.append(best)
    n_counts = tuple(res.count for res in per_rank)
    if n_counts[-1] == 0:
        return UnrelatedResult(empty_schedule(inst.n), None, None, None)

    boundaries: list[int] = []
    prev = 0
    while True:
        nxt = next((r for r in range(1, m + 1) if n_counts[r - 1] > 4 * prev), None)
        if nxt is None:
            break
        boundaries.append(nxt)
        prev = n_counts[nxt - 1]
    k = len(boundaries)
    assigned_sets = [set(per_rank[r - 1].schedule.assigned) for r in boundaries]
    S_sets: list[tuple[int, ...]] = []
    seen: set[int] = set()
    for ell, r in enumerate(boundaries):
        S_sets.append(tuple(sorted(assigned_sets[ell] - seen)))
        seen |= assigned_sets[ell]
    q = next(
        (ell + 1 for ell, r in enumerate(boundaries) if n_counts[r - 1] >= 2 * k), None
    )
    buckets = RankBuckets(tuple(boundaries), n_counts, tuple(S_sets), k, q)
    sigma_r1 = per_rank[boundaries[0] - 1].schedule

    if q is None:
        return UnrelatedResult(sigma_r1, buckets, None, None)

    G = k - q + 1
    sigma_map: dict[int, int] = {}
    owner_bucket: dict[int, int] = {}
    for ell in range(q, k + 1):
        sched_ell = per_rank[boundaries[ell - 1] - 1].schedule
        for j in S_sets[ell - 1]:
            sigma_map[j] = sched_ell.assign[j]
            owner_bucket[j] = ell
    sigma = Schedule(tuple(sigma_map.get(j) for j in range(inst.n)))

    poly = RationalLP()
    for j in sorted(sigma_map):
        poly.add_variable(j, 0, 1)
    for i in inst.machines:
        mine = sorted(
            (j for j in sigma_map if sigma_map[j] == i),
            key=lambda j: (-inst.time(j, i), j),
        )
        for c in range(0, len(mine), G):
            poly.add_constraint({j: 1 for j in mine[c : c + G]}, "<=", 1)
    for ell in range(q, k + 1):
        members = [j for j in sigma_map if owner_bucket[j] == ell]
        if members:
            poly.add_constraint({j: 1 for j in members}, ">=", len(members) // G)
    x = {j: Fraction(1, G) for j in sigma_map}
    deco = decompose(x, poly)
    y = deco.points[0]  # any integral point of the polytope works; take the first

    assign = list(sigma_r1.assign)
    for j, val in y.items():
        if val == 1:
            assign[j] = sigma_map[j]
    schedule = Schedule(tuple(assign))
    if makespan(schedule, inst) > 3 * inst.T:
        raise StructuralError("unrelated schedule exceeded makespan 3T")
    return UnrelatedResult(schedule, buckets, G, sigma)


# ---------------------------------------------------------------------------
# Exact benchmark and the hard parallel instance
# ---------------------------------------------------------------------------


def maxrank_sched(inst: SchedulingInstance, r: int, jobs: Iterable[int] | None = None) -> int:
    """Exact maxrank_r: most jobs placeable on top-r machines within makespan T.

    Exhaustive machine-by-machine subset DP (3^n-ish); capped at desk scale.
    """
    S = sorted(set(range(inst.n) if jobs is None else jobs))
    if len(S) > MAXRANK_JOB_CAP or inst.m > MAXRANK_MACHINE_CAP:
        raise ResourceError(
            f"exact scheduling oracle capped at {MAXRANK_JOB_CAP} jobs / {MAXRANK_MACHINE_CAP} machines"
        )
    nn = len(S)
    full = (1 << nn) - 1
    g = [0] * (full + 1)
    for i in inst.machines:
        elig = 0
        for idx, j in enumerate(S):
            t = inst.time(j, i)
            if inst.pos(j, i) <= r and t != INF and t <= inst.T:
                elig |= 1 << idx
        if not elig:
            continue
        load: list = [None] * (full + 1)
        feas_count: list = [0] * (full + 1)
        load[0] = Fraction(0)
        sub = elig
        submasks = []
        while True:
            submasks.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & elig
        for s in sorted(submasks):
            if s == 0:
                continue
            low = s & -s
            prev = s ^ low
            t = inst.time(S[low.bit_length() - 1], i)
            load[s] = (load[prev] + t) if load[prev] is not None and load[prev] <= inst.T else None
            feas_count[s] = s.bit_count() if load[s] is not None and load[s] <= inst.T else -1
        ng = [0] * (full + 1)
        for mask in range(full + 1):
            t = mask & elig
            best = g[mask]
            s = t
            while s:
                fc = feas_count[s]
                if fc > 0:
                    cand = fc + g[mask ^ s]
                    if cand > best:
                        best = cand
                s = (s - 1) & t
            ng[mask] = best
        g = ng
    return g[full]


def gen_parallel_lb(m: int, k: int, T=1) -> SchedulingInstance:
    """Hard parallel instance: geometric job groups forcing factor Omega(log m / beta).

    Group i < k holds 2^(i-1)(m-i+1) jobs of size T/2^(i-1): machines 1..i-1
    occupy ranks 1..i-1 and the group's machine sits at rank i.  The last group
    holds 2^k * m jobs of size T/2^k spread over machines k..m (at least 2^k
    per machine, surplus dealt round-robin).  Remaining ranks fill ascending.
    """
    if k < 1 or m < k:
        raise DomainError("need m >= k >= 1")
    T = Fraction(T)
    sizes: list[Fraction] = []
    lists: list[list[int]] = []

    def add_job(size: Fraction, i: int, ell: int) -> None:
        prefix = list(range(1, i)) + [ell]
        sizes.append(size)
        lists.append(prefix + [mm for mm in range(1, m + 1) if mm not in prefix])

    for i in range(1, k):
        for ell in range(i, m + 1):
            for _ in range(2 ** (i - 1)):
                add_job(T / 2 ** (i - 1), i, ell)
    group_counts = {ell: 2**k for ell in range(k, m + 1)}
    surplus = 2**k * m - 2**k * (m - k + 1)
    slots = list(range(k, m + 1))
    for t in range(surplus):
        group_counts[slots[t % len(slots)]] += 1
    for ell in range(k, m + 1):
        for _ in range(group_counts[ell]):
            add_job(T / 2**k, k, ell)
    return SchedulingInstance.parallel(T, sizes, lists)
