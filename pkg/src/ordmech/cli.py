"""Command-line front end.

Subcommands:
    gen        write a named instance family to JSON
    run        run an algorithm on an instance; JSON result + factor table CSV
    match      alias of run for matching algorithms
    sched      alias of run for scheduling algorithms
    verify     exhaustively check a truthfulness property of a named mechanism
    bench      run an algorithm over a batch of random instances, CSV summary
    decompose  Birkhoff-von Neumann decomposition of a fractional matching

Exit codes: 0 success / property holds; 1 property violated; 2 usage error
(argparse); 3 unknown algorithm, mechanism, or family; 4 exact benchmark
beyond its desk-scale cap (outputs written without maxrank columns);
5 invalid input file or parameters.

Sampling subcommands (rsd-sample) use Python's Mersenne Twister
(random.Random) seeded from --seed, so equal configurations give
byte-identical outputs.  ORDMECH_THREADS caps bench worker processes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import formats, gallery
from .errors import DomainError, OrdmechError, ResourceError
from .general import GeneralInstance, best_factor_lottery, gen_det_lb, gen_randrank_lb, plurality, plurality_scf, randrank
from .matching import (
    MatchingInstance,
    bvn_decompose,
    expected_matching_histogram,
    gen_matching_lb,
    gen_sqrt_instance,
    matching_histogram,
    max_match,
    maxmatch_scf,
    maxranks_matching,
    ps,
    ps_mechanism,
    rsd,
    rsd_mechanism,
    rsd_sampled,
    ttca,
)
from .prefs import histogram
from .sched import (
    SchedulingInstance,
    gen_parallel_lb,
    makespan,
    maxrank_sched,
    parallel_det,
    parallel_rand,
    rnkcomp,
    sched_histogram,
    unrelated,
)
from .verify import EpsilonSchedule, classify_truthfulness, is_pseudomonotone, lt_wrapper

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_UNKNOWN_NAME = 3
EXIT_ORACLE_CAP = 4
EXIT_BAD_INPUT = 5


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_text(path, text) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    family = args.family
    try:
        if family == "matching-lb":
            inst = gen_matching_lb(args.K)
        elif family == "sqrt":
            inst = gen_sqrt_instance(args.n)
        elif family == "det-lb":
            inst = gen_det_lb(args.n)
        elif family == "randrank-lb":
            inst = gen_randrank_lb(args.k)
        elif family == "parallel-lb":
            inst = gen_parallel_lb(args.m, args.k, Fraction(args.T))
        else:
            print(f"unknown family {family!r}", file=sys.stderr)
            return EXIT_UNKNOWN_NAME
    except DomainError as exc:
        print(f"bad parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    payload = formats.instance_to_json(inst)
    _write_json(args.out, payload)
    stats = {"n": payload["n"], "m": payload["m"]}
    if isinstance(inst, (MatchingInstance,)):
        stats["maxranks"] = maxranks_matching(inst)
    elif isinstance(inst, GeneralInstance):
        stats["maxranks"] = inst.maxranks()
    elif isinstance(inst, SchedulingInstance) and inst.n <= 12 and inst.m <= 5:
        stats["maxranks"] = [maxrank_sched(inst, r) for r in range(1, inst.m + 1)]
    print(json.dumps(stats, sort_keys=True), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

MATCHING_ALGOS = ("maxmatch", "rsd", "rsd-sample", "ttca", "ps")
SCHED_ALGOS = ("parallel-det", "parallel-rand", "unrelated", "rnkcomp")
GENERAL_ALGOS = ("randrank", "plurality", "best-lottery")


def _run_matching(algo, inst: MatchingInstance, args):
    if algo == "maxmatch":
        matching = max_match(inst)
        result = {"matching": formats._outcome_to_json(matching)}
        expected = [Fraction(c) for c in matching_histogram(matching, inst).counts]
    elif algo == "ttca":
        matching = ttca(inst)
        result = {"matching": formats._outcome_to_json(matching)}
        expected = [Fraction(c) for c in matching_histogram(matching, inst).counts]
    elif algo == "rsd":
        lottery = rsd(inst)
        result = {"lottery": formats.lottery_to_json(lottery)}
        expected = expected_matching_histogram(lottery, inst)
    elif algo == "rsd-sample":
        lottery = rsd_sampled(inst, args.samples, args.seed)
        result = {"lottery": formats.lottery_to_json(lottery), "samples": args.samples, "seed": args.seed}
        expected = expected_matching_histogram(lottery, inst)
    else:  # ps
        fm = ps(inst)
        lottery = bvn_decompose(fm)
        result = {"x": formats.fractional_to_json(fm)["x"], "lottery": formats.lottery_to_json(lottery)}
        expected = expected_matching_histogram(lottery, inst)
    return result, expected, maxranks_matching(inst)


def _run_sched(algo, inst: SchedulingInstance, args):
    if algo == "parallel-det":
        schedule = parallel_det(inst)
        result = {"schedule": formats._outcome_to_json(schedule), "makespan": formats.frac_to_str(makespan(schedule, inst))}
        expected = [Fraction(c) for c in sched_histogram(schedule, inst).counts]
    elif algo == "parallel-rand":
        res = parallel_rand(inst)
        result = {
            "lottery": formats.lottery_to_json(res.lottery),
            "B": list(res.B),
            "k": res.k,
        }
        acc = [Fraction(0)] * inst.m
        for schedule, w in res.lottery.items():
            for i, c in enumerate(sched_histogram(schedule, inst).counts):
                acc[i] += w * c
        expected = acc
    elif algo == "rnkcomp":
        res = rnkcomp(inst, args.rank or 1)
        result = {
            "schedule": formats._outcome_to_json(res.schedule),
            "count": res.count,
            "lp_value": formats.frac_to_str(res.lp_value),
        }
        expected = [Fraction(c) for c in sched_histogram(res.schedule, inst).counts]
    else:  # unrelated
        res = unrelated(inst)
        result = {"schedule": formats._outcome_to_json(res.schedule), "makespan": formats.frac_to_str(makespan(res.schedule, inst))}
        expected = [Fraction(c) for c in sched_histogram(res.schedule, inst).counts]
    try:
        maxranks = [maxrank_sched(inst, r) for r in range(1, inst.m + 1)]
    except ResourceError:
        maxranks = None
    return result, expected, maxranks


def _run_general(algo, inst: GeneralInstance, args):
    if algo == "randrank":
        res = randrank(inst)
        result = {"lottery": formats.lottery_to_json(res.lottery), "k": res.k, "boundaries": list(res.boundaries)}
        acc = [Fraction(0)] * inst.m
        for o, w in res.lottery.items():
            for i, c in enumerate(histogram(o, inst.profile).counts):
                acc[i] += w * c
        expected = acc
    elif algo == "plurality":
        o = plurality(inst)
        result = {"outcome": o}
        expected = [Fraction(c) for c in histogram(o, inst.profile).counts]
    else:  # best-lottery
        best = best_factor_lottery(inst)
        result = {
            "fraction": formats.frac_to_str(best.fraction),
            "factor": formats.frac_to_str(best.factor) if best.fraction else "inf",
            "weights": {str(o): formats.frac_to_str(w) for o, w in sorted(best.weights.items(), key=lambda t: str(t[0]))},
        }
        acc = [Fraction(0)] * inst.m
        for o, w in best.weights.items():
            for i, c in enumerate(histogram(o, inst.profile).counts):
                acc[i] += w * c
        expected = acc
    return result, expected, inst.maxranks()


def cmd_run(args) -> int:
    try:
        inst = formats.load_instance(args.infile)
    except (OSError, ValueError, DomainError) as exc:
        print(f"cannot load instance: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    algo = args.algo
    try:
        if algo in MATCHING_ALGOS:
            if not isinstance(inst, MatchingInstance):
                print("algorithm expects a matching instance", file=sys.stderr)
                return EXIT_BAD_INPUT
            result, expected, maxranks = _run_matching(algo, inst, args)
        elif algo in SCHED_ALGOS:
            if not isinstance(inst, SchedulingInstance):
                print("algorithm expects a scheduling instance", file=sys.stderr)
                return EXIT_BAD_INPUT
            result, expected, maxranks = _run_sched(algo, inst, args)
        elif algo in GENERAL_ALGOS:
            if isinstance(inst, MatchingInstance):
                inst = GeneralInstance(inst.profile)
            if not isinstance(inst, GeneralInstance):
                print("algorithm expects a general instance", file=sys.stderr)
                return EXIT_BAD_INPUT
            result, expected, maxranks = _run_general(algo, inst, args)
        else:
            print(f"unknown algorithm {algo!r}", file=sys.stderr)
            return EXIT_UNKNOWN_NAME
    except ResourceError as exc:
        print(f"desk-scale cap exceeded: {exc}", file=sys.stderr)
        return EXIT_ORACLE_CAP
    except DomainError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    _write_json(args.out, result)
    if args.table:
        _write_text(args.table, formats.factor_table_csv(expected, maxranks))
    if maxranks is None:
        print("exact benchmark beyond desk-scale cap: maxrank columns omitted", file=sys.stderr)
        return EXIT_ORACLE_CAP
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _parse_domain(spec: str) -> tuple[int, int]:
    try:
        n, m = spec.lower().split("x")
        return int(n), int(m)
    except ValueError:
        raise DomainError(f"domain must look like '3x3', got {spec!r}") from None


def _mechanism_registry(n: int, m: int, eps: Fraction):
    sched = lambda ranks: EpsilonSchedule.proportional(eps, ranks)
    outcomes = tuple(range(1, m + 1))
    return {
        "maxmatch": lambda: ("scf", maxmatch_scf(n, m)),
        "plurality": lambda: ("scf", plurality_scf(outcomes, n)),
        "absorbing-top-choice": lambda: ("scf", gallery.absorbing_top_choice_scf(outcomes[:3])),
        "ps": lambda: ("mech", ps_mechanism(n, m)),
        "rsd": lambda: ("mech", rsd_mechanism(n, m)),
        "weak-only": lambda: ("mech", gallery.weak_only_mechanism(tuple(range(1, 5)))),
        "top2-unilateral": lambda: ("mech", gallery.top_two_unilateral(outcomes, n)),
    }


def cmd_verify(args) -> int:
    eps = Fraction(args.eps)
    try:
        n, m = _parse_domain(args.domain)
        registry = _mechanism_registry(n, m, eps)
        if args.mechanism not in registry:
            print(f"unknown mechanism {args.mechanism!r}", file=sys.stderr)
            return EXIT_UNKNOWN_NAME
        kind, obj = registry[args.mechanism]()
        if args.property == "pseudo":
            if kind != "scf":
                print("pseudomonotonicity applies to deterministic SCFs only", file=sys.stderr)
                return EXIT_BAD_INPUT
            ok, report = is_pseudomonotone(obj)
        else:
            if kind == "scf":
                ranks = len(obj.domain[0][0])
                obj = lt_wrapper(obj, EpsilonSchedule.proportional(eps, ranks))
            result = classify_truthfulness(obj)
            order = {"strong": 0, "lex": 1, "weak": 2, "none": 3}
            ok = order[result.label] <= order[args.property]
            report = {
                "strong": result.strong_violation,
                "lex": result.lex_violation,
                "weak": result.weak_violation,
            }[args.property]
    except ResourceError as exc:
        print(f"domain too large: {exc}", file=sys.stderr)
        return EXIT_ORACLE_CAP
    except DomainError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if ok:
        _write_json(args.out, {"property": args.property, "mechanism": args.mechanism, "holds": True})
        return EXIT_OK
    payload = {"property": args.property, "mechanism": args.mechanism, "holds": False}
    if report is not None:
        payload["witness"] = {
            "agent": report.agent,
            "true_list": list(report.true_list),
            "misreport": list(report.misreport),
            "profile": [list(pl) for pl in report.truthful_profile],
        }
    _write_json(args.out, payload)
    return EXIT_VIOLATION


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _bench_one(task):
    import random

    family, algo, n, m, seed = task
    rng = random.Random(seed)
    items = list(range(1, m + 1))
    lists = []
    for _ in range(n):
        perm = items[:]
        rng.shuffle(perm)
        lists.append(perm)
    if family == "random-matching":
        inst = MatchingInstance.from_lists(lists, m)
        if algo == "maxmatch":
            expected = [Fraction(c) for c in matching_histogram(max_match(inst), inst).counts]
        else:
            expected = expected_matching_histogram(rsd(inst), inst)
        maxranks = maxranks_matching(inst)
    else:  # random-general
        inst = GeneralInstance.from_lists(lists)
        res = randrank(inst)
        acc = [Fraction(0)] * inst.m
        for o, w in res.lottery.items():
            for i, c in enumerate(histogram(o, inst.profile).counts):
                acc[i] += w * c
        expected = acc
        maxranks = inst.maxranks()
    worst = Fraction(1)
    for e, tgt in zip(expected, maxranks):
        if tgt and e:
            worst = max(worst, Fraction(tgt) / e)
    return seed, formats.frac_to_str(worst)


def cmd_bench(args) -> int:
    if args.family not in ("random-matching", "random-general"):
        print(f"unknown family {args.family!r}", file=sys.stderr)
        return EXIT_UNKNOWN_NAME
    if args.family == "random-matching" and args.algo not in ("maxmatch", "rsd"):
        print(f"unsupported bench algorithm {args.algo!r}", file=sys.stderr)
        return EXIT_UNKNOWN_NAME
    tasks = [
        (args.family, args.algo, args.n, args.m, args.seed + t) for t in range(args.count)
    ]
    workers = int(os.environ.get("ORDMECH_THREADS", "1"))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    lines = ["seed,max_ratio"] + [f"{seed},{ratio}" for seed, ratio in rows]
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_decompose(args) -> int:
    try:
        with open(args.infile) as fh:
            fm = formats.fractional_from_json(json.load(fh))
    except (OSError, ValueError, DomainError) as exc:
        print(f"cannot load fractional matching: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    lottery = bvn_decompose(fm)
    _write_json(args.out, formats.lottery_to_json(lottery))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordmech",
        description="Ordinal mechanism design: rank approximation and lex-truthfulness.",
        epilog=(
            "exit codes: 0 ok/holds, 1 property violated, 2 usage error, "
            "3 unknown name, 4 benchmark beyond desk-scale cap, 5 bad input"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a named instance family")
    g.add_argument("--family", required=True, choices=["matching-lb", "sqrt", "det-lb", "randrank-lb", "parallel-lb"])
    g.add_argument("--K", type=int, default=3)
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--T", default="1")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    def add_run(name, help_text, algos):
        r = sub.add_parser(name, help=help_text)
        r.add_argument("--algo", required=True, choices=list(algos))
        r.add_argument("--in", dest="infile", required=True)
        r.add_argument("--out", default="-")
        r.add_argument("--table", default=None, help="write the per-rank factor CSV here")
        r.add_argument("--seed", type=int, default=0)
        r.add_argument("--samples", type=int, default=1000)
        r.add_argument("--rank", type=int, default=None, help="rank r for rnkcomp")
        r.set_defaults(func=cmd_run)

    add_run("run", "run any algorithm on an instance", MATCHING_ALGOS + SCHED_ALGOS + GENERAL_ALGOS)
    add_run("match", "run a matching-market algorithm", MATCHING_ALGOS)
    add_run("sched", "run a scheduling-market algorithm", ("parallel-det", "parallel-rand", "unrelated", "rnkcomp"))

    v = sub.add_parser("verify", help="exhaustively verify a truthfulness property")
    v.add_argument("--mechanism", required=True)
    v.add_argument("--property", required=True, choices=["strong", "lex", "weak", "pseudo"])
    v.add_argument("--domain", default="3x3", help="exhaustive domain, e.g. 3x3")
    v.add_argument("--eps", default="1/4", help="epsilon for wrapping SCFs, e.g. 1/4")
    v.add_argument("--out", default="-")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="factor table over random instances")
    b.add_argument("--family", required=True, choices=["random-matching", "random-general"])
    b.add_argument("--algo", default="maxmatch")
    b.add_argument("--count", type=int, default=20)
    b.add_argument("--n", type=int, default=5)
    b.add_argument("--m", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("decompose", help="Birkhoff-von Neumann decomposition of x")
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--out", default="-")
    d.set_defaults(func=cmd_decompose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OrdmechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
