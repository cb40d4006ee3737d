"""JSON instance schemas and CSV table emitters.

Instances:
    {"kind": "strict",  "n": 3, "m": 3, "lists": [[1,2,3], ...]}
    {"kind": "general", "n": 3, "m": 3, "lists": [[...]], "outcomes": [...]?}
    {"kind": "indiff",  "n": 2, "m": 3, "classes": [[[1,2],[3]], ...]}
    {"kind": "matroid", "n": 3, "m": 2, "lists": [[...]],
     "matroids": [{"kind":"uniform","k":1}, ...]}
    {"kind": "sched",   "n": 2, "m": 2, "T": "3/2",
     "p": [["1/2", "inf"], ...],  # p[j][i-1], job-major
     "prefs": [[1,2],[2,1]]}      # kind may be omitted when "T" is present

Matroid specs: {"kind":"uniform","k":2} | {"kind":"partition","groups":[...],
"caps":{"0":1}} | {"kind":"explicit","ground":[...],"independent":[[...]]}.

Rationals serialize as strings "num/den" (or plain integers); infinity as "inf".
CSV emitters cover the per-outcome histogram dump (outcome,i,rank_i) and the
per-rank factor table (r,rank_r,maxrank_r,ratio).
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DomainError
from .general import GeneralInstance
from .matching import FractionalMatching, Matching, MatchingInstance
from .matroid import ExplicitMatroid, MatroidMarket, PartitionMatroid, UniformMatroid
from .prefs import IndiffProfile, Lottery
from .sched import Schedule, SchedulingInstance


def frac_to_str(v) -> str:
    if v == math.inf:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def frac_from_obj(obj):
    if obj == "inf":
        return math.inf
    if isinstance(obj, str):
        if "/" in obj:
            num, den = obj.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(obj))
    if isinstance(obj, int):
        return Fraction(obj)
    raise DomainError(f"cannot parse rational from {obj!r}")


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


def matroid_to_json(matroid) -> dict:
    if isinstance(matroid, UniformMatroid):
        return {"kind": "uniform", "k": matroid.k}
    if isinstance(matroid, PartitionMatroid):
        return {
            "kind": "partition",
            "groups": list(matroid.groups),
            "caps": {str(g): c for g, c in matroid.caps},
        }
    if isinstance(matroid, ExplicitMatroid):
        return {
            "kind": "explicit",
            "ground": sorted(matroid.ground),
            "independent": sorted(sorted(s) for s in matroid.independent),
        }
    raise DomainError(f"cannot serialize matroid {matroid!r}")


def matroid_from_json(obj: Mapping):
    kind = obj.get("kind")
    if kind == "uniform":
        return UniformMatroid(int(obj["k"]))
    if kind == "partition":
        return PartitionMatroid(
            tuple(int(g) for g in obj["groups"]),
            tuple(sorted((int(g), int(c)) for g, c in obj["caps"].items())),
        )
    if kind == "explicit":
        return ExplicitMatroid(obj["ground"], obj["independent"])
    raise DomainError(f"unknown matroid kind {kind!r}")


def instance_to_json(inst) -> dict:
    if isinstance(inst, MatchingInstance):
        return {
            "kind": "strict",
            "n": inst.n,
            "m": inst.m,
            "lists": [list(l) for l in inst.profile.lists],
        }
    if isinstance(inst, GeneralInstance):
        return {
            "kind": "general",
            "n": inst.n,
            "m": inst.m,
            "lists": [list(l) for l in inst.profile.lists],
            "outcomes": list(inst.outcomes),
        }
    if isinstance(inst, MatroidMarket):
        return {
            "kind": "matroid",
            "n": inst.n,
            "m": inst.m,
            "lists": [list(l) for l in inst.profile.lists],
            "matroids": [matroid_to_json(mt) for mt in inst.matroids],
        }
    if isinstance(inst, SchedulingInstance):
        return {
            "kind": "sched",
            "n": inst.n,
            "m": inst.m,
            "T": frac_to_str(inst.T),
            "p": [[frac_to_str(v) for v in row] for row in inst.p],
            "prefs": [list(l) for l in inst.profile.lists],
        }
    if isinstance(inst, IndiffProfile):
        return {
            "kind": "indiff",
            "n": inst.n_agents,
            "m": len(inst.universe),
            "universe": list(inst.universe),
            "classes": [[list(part) for part in parts] for parts in inst.classes],
        }
    raise DomainError(f"cannot serialize instance {type(inst).__name__}")


def instance_from_json(obj: Mapping):
    kind = obj.get("kind")
    if kind is None and "T" in obj:
        kind = "sched"
    if kind == "strict":
        return MatchingInstance.from_lists(obj["lists"], int(obj["m"]))
    if kind == "general":
        return GeneralInstance.from_lists(obj["lists"], obj.get("outcomes"))
    if kind == "matroid":
        return MatroidMarket.from_lists(
            obj["lists"], [matroid_from_json(mt) for mt in obj["matroids"]]
        )
    if kind == "sched":
        rows = [[frac_from_obj(v) for v in row] for row in obj["p"]]
        return SchedulingInstance.build(frac_from_obj(obj["T"]), rows, obj["prefs"])
    if kind == "indiff":
        universe = tuple(obj["universe"]) if "universe" in obj else tuple(range(1, int(obj["m"]) + 1))
        return IndiffProfile(
            universe, tuple(tuple(tuple(part) for part in parts) for parts in obj["classes"])
        )
    raise DomainError(f"unknown instance kind {kind!r}")


def dump_instance(inst, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path):
    with open(path) as fh:
        return instance_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


def _outcome_to_json(outcome):
    if isinstance(outcome, Matching) or isinstance(outcome, Schedule):
        return {"assign": list(outcome.assign)}
    if hasattr(outcome, "assign"):  # matroid Allocation
        return {"assign": list(outcome.assign)}
    return outcome


def lottery_to_json(lottery: Lottery) -> dict:
    support = [
        {"weight": frac_to_str(w), "outcome": _outcome_to_json(o)}
        for o, w in sorted(lottery.items(), key=lambda ow: repr(ow[0]))
    ]
    return {"support": support}


def fractional_to_json(fm: FractionalMatching) -> dict:
    return {"x": [[frac_to_str(v) for v in row] for row in fm.x]}


def fractional_from_json(obj: Mapping) -> FractionalMatching:
    return FractionalMatching(
        tuple(tuple(Fraction(frac_from_obj(v)) for v in row) for row in obj["x"])
    )


def histogram_csv(rows: Sequence[tuple]) -> str:
    """Rows (outcome, i, rank_i) -> 'outcome,i,rank_i' CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["outcome", "i", "rank_i"])
    for outcome, i, count in rows:
        writer.writerow([outcome, i, count])
    return buf.getvalue()


def factor_table_csv(
    expected: Sequence, maxranks: Sequence | None
) -> str:
    """Per-rank table 'r,rank_r,maxrank_r,ratio'; benchmark columns may be absent."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["r", "rank_r", "maxrank_r", "ratio"])
    for r, value in enumerate(expected, start=1):
        if maxranks is None:
            writer.writerow([r, frac_to_str(value), "", ""])
            continue
        tgt = maxranks[r - 1]
        if tgt == 0:
            ratio = "1"
        elif value == 0:
            ratio = "inf"
        else:
            ratio = frac_to_str(Fraction(tgt) / Fraction(value))
        writer.writerow([r, frac_to_str(value), tgt, ratio])
    return buf.getvalue()
