import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from ordmech import (
    GeneralInstance,
    MatchingInstance,
    MatroidMarket,
    PartitionMatroid,
    SchedulingInstance,
    UniformMatroid,
)
from ordmech import formats
from ordmech.cli import main
from ordmech.matching import ps
from ordmech.prefs import IndiffProfile


def roundtrip(inst):
    return formats.instance_from_json(json.loads(json.dumps(formats.instance_to_json(inst))))


def test_fraction_codec():
    assert formats.frac_to_str(Fraction(3, 5)) == "3/5"
    assert formats.frac_to_str(Fraction(4)) == "4"
    assert formats.frac_to_str(math.inf) == "inf"
    assert formats.frac_from_obj("3/5") == Fraction(3, 5)
    assert formats.frac_from_obj(7) == Fraction(7)
    assert formats.frac_from_obj("inf") == math.inf


def test_matching_instance_roundtrip():
    inst = MatchingInstance.from_lists([[2, 1, 3], [1, 2, 3]], 3)
    assert roundtrip(inst) == inst


def test_general_instance_roundtrip():
    inst = GeneralInstance.from_lists([["x", "y"], ["y", "x"]], ("x", "y"))
    assert roundtrip(inst) == inst


def test_matroid_market_roundtrip():
    market = MatroidMarket.from_lists(
        [[1, 2], [2, 1]],
        [UniformMatroid(1), PartitionMatroid((0, 1), ((0, 1), (1, 1)))],
    )
    back = roundtrip(market)
    assert back.profile == market.profile
    assert back.matroids[0] == market.matroids[0]
    assert back.matroids[1] == market.matroids[1]


def test_sched_instance_roundtrip_with_inf():
    inst = SchedulingInstance.build(
        Fraction(3, 2), [[Fraction(1, 2), math.inf], [1, 1]], [[1, 2], [2, 1]]
    )
    back = roundtrip(inst)
    assert back == inst
    # "kind" may be omitted when T is present
    payload = formats.instance_to_json(inst)
    del payload["kind"]
    assert formats.instance_from_json(payload) == inst


def test_indiff_profile_roundtrip():
    prof = IndiffProfile(("a", "b", "c"), ((("a", "b"), ("c",)), (("c",), ("a", "b"))))
    back = roundtrip(prof)
    assert back.classes == prof.classes


def test_histogram_and_factor_csv():
    text = formats.histogram_csv([("a", 1, 2), ("a", 2, 3)])
    assert text.splitlines()[0] == "outcome,i,rank_i"
    table = formats.factor_table_csv([Fraction(1), Fraction(2)], [2, 2])
    lines = table.splitlines()
    assert lines[1] == "1,1,2,2" and lines[2] == "2,2,2,1"
    omitted = formats.factor_table_csv([Fraction(1)], None)
    assert omitted.splitlines()[1] == "1,1,,"


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def run_cli(*argv) -> int:
    return main(list(argv))


def test_cli_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("gen", "--family", "matching-lb", "--K", "3", "--out", str(a)) == 0
    assert run_cli("gen", "--family", "matching-lb", "--K", "3", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_gen_det_lb(tmp_path):
    out = tmp_path / "d.json"
    assert run_cli("gen", "--family", "det-lb", "--n", "4", "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["n"] == 4 and payload["m"] == 5


def test_cli_run_maxmatch_table(tmp_path):
    inst = tmp_path / "i.json"
    run_cli("gen", "--family", "matching-lb", "--K", "3", "--out", str(inst))
    res, table = tmp_path / "r.json", tmp_path / "t.csv"
    code = run_cli("match", "--algo", "maxmatch", "--in", str(inst), "--out", str(res), "--table", str(table))
    assert code == 0
    rows = table.read_text().splitlines()
    assert rows[0] == "r,rank_r,maxrank_r,ratio"
    ratios = [row.split(",")[3] for row in rows[1:]]
    assert max(Fraction(x) for x in ratios) >= Fraction(5, 3)


def test_cli_run_randrank_and_ps(tmp_path):
    gen_out = tmp_path / "g.json"
    run_cli("gen", "--family", "randrank-lb", "--k", "2", "--out", str(gen_out))
    assert run_cli("run", "--algo", "randrank", "--in", str(gen_out), "--out", str(tmp_path / "rr.json")) == 0

    sq = tmp_path / "s.json"
    run_cli("gen", "--family", "sqrt", "--n", "9", "--out", str(sq))
    res = tmp_path / "ps.json"
    assert run_cli("match", "--algo", "ps", "--in", str(sq), "--out", str(res)) == 0
    payload = json.loads(res.read_text())
    inst = formats.load_instance(sq)
    x = ps(inst)
    assert payload["x"] == formats.fractional_to_json(x)["x"]
    assert payload["x"][0][0] == "4/9"  # (k+1)/n at n=9


def test_cli_run_unknown_algo_exit_code(tmp_path):
    inst = tmp_path / "i.json"
    run_cli("gen", "--family", "matching-lb", "--K", "2", "--out", str(inst))
    with pytest.raises(SystemExit):  # argparse rejects unknown choices with code 2
        run_cli("run", "--algo", "nope", "--in", str(inst))


def test_cli_run_bad_instance_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{""not"": 1}")
    assert run_cli("run", "--algo", "maxmatch", "--in", str(bad)) == 5


def test_cli_sched_oracle_cap_exit_code(tmp_path):
    # 13 jobs exceed the exact benchmark cap: run succeeds, exit code 4 flags it
    inst = tmp_path / "big.json"
    n = 13
    payload = {
        "kind": "sched",
        "n": n,
        "m": 2,
        "T": "10",
        "p": [["1", "1"] for _ in range(n)],
        "prefs": [[1, 2] for _ in range(n)],
    }
    inst.write_text(json.dumps(payload))
    out = tmp_path / "o.json"
    code = run_cli("sched", "--algo", "parallel-det", "--in", str(inst), "--out", str(out), "--table", str(tmp_path / "t.csv"))
    assert code == 4
    assert (tmp_path / "t.csv").read_text().splitlines()[1].endswith(",,")


def test_cli_verify_holds_and_violation(tmp_path):
    assert run_cli("verify", "--mechanism", "absorbing-top-choice", "--property", "pseudo", "--domain", "1x3") == 0
    assert run_cli("verify", "--mechanism", "weak-only", "--property", "weak", "--domain", "1x4") == 0
    out = tmp_path / "v.json"
    code = run_cli("verify", "--mechanism", "weak-only", "--property", "lex", "--domain", "1x4", "--out", str(out))
    assert code == 1
    payload = json.loads(out.read_text())
    assert payload["holds"] is False and payload["witness"]["misreport"] == [1, 2, 3, 4]


def test_cli_verify_unknown_mechanism():
    assert run_cli("verify", "--mechanism", "nope", "--property", "lex", "--domain", "2x2") == 3


def test_cli_bench_and_decompose(tmp_path):
    out = tmp_path / "b.csv"
    assert run_cli("bench", "--family", "random-matching", "--algo", "maxmatch",
                   "--count", "5", "--n", "4", "--m", "4", "--seed", "1", "--out", str(out)) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "seed,max_ratio" and len(rows) == 6
    assert all(Fraction(r.split(",")[1]) <= 2 for r in rows[1:])

    fm = tmp_path / "x.json"
    fm.write_text(json.dumps({"x": [["1/2", "1/2"], ["1/2", "1/2"]]}))
    dec = tmp_path / "d.json"
    assert run_cli("decompose", "--in", str(fm), "--out", str(dec)) == 0
    payload = json.loads(dec.read_text())
    assert sorted(pt["weight"] for pt in payload["support"]) == ["1/2", "1/2"]


def test_cli_entrypoint_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ordmech.cli", "gen", "--family", "sqrt", "--n", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 4


def test_cli_verify_spec_named_invocations():
    # the two flagship exhaustive runs: pseudomonotone MaxMatch, lex-truthful PS
    assert run_cli("verify", "--mechanism", "maxmatch", "--property", "pseudo", "--domain", "3x3") == 0
    assert run_cli("verify", "--mechanism", "ps", "--property", "lex", "--domain", "3x3") == 0


def test_cli_bench_respects_worker_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ORDMECH_THREADS", "2")
    out = tmp_path / "b.csv"
    assert run_cli("bench", "--family", "random-general", "--algo", "randrank",
                   "--count", "4", "--n", "4", "--m", "4", "--seed", "9", "--out", str(out)) == 0
    assert len(out.read_text().splitlines()) == 5
