import csv
import io
import json

import pytest

from muipc import parse
from muipc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eliminate_example(capsys):
    code, out, _ = run(capsys, "eliminate", "mu x. ((x->b)->a)", "--tight")
    assert code == 0 and out.strip() == "(a->b)->a"
    code, out, _ = run(capsys, "eliminate", "mu x. ((x->b)->a)")
    assert parse(out.strip()) is parse("(a->b)->a")


def test_closure_ordinal_example(capsys):
    code, out, _ = run(capsys, "closure-ordinal", "b \\/ (a1->x) \\/ (a2->x)", "--var", "x")
    assert code == 0 and out.strip() == "3"


def test_prove_example(capsys):
    code, out, _ = run(capsys, "prove", "((a->b)->a)->a")
    assert code == 1 and out.strip() == "not derivable"
    code, out, _ = run(capsys, "prove", "b", "--assume", "a", "--assume", "a -> b")
    assert code == 0 and out.strip() == "derivable"


def test_check_equiv(capsys):
    assert run(capsys, "check-equiv", "mu x. ((x->b)->a)", "(a->b)->a")[0] == 0
    assert run(capsys, "check-equiv", "a", "~~a")[0] == 1


def test_usage_and_parse_errors(capsys):
    code, _, err = run(capsys, "eliminate", "mu x. (x ->")
    assert code == 2 and "position" in err
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "eliminate")[0] == 2
    assert run(capsys, "closure-ordinal", "x", "--cap", "0")[0] == 2
    assert run(capsys, "eliminate", "--file", "/nonexistent/f.txt")[0] == 2


def test_cap_exceeded_is_logical_failure(capsys):
    code, _, err = run(capsys, "closure-ordinal", "b \\/ (a1->x) \\/ (a2->x)", "--cap", "1")
    assert code == 1 and "within 1 steps" in err


def test_batch_keeps_order(tmp_path, capsys):
    f = tmp_path / "in.txt"
    lines = ["b \\/ (a1->x)", "# comment", "b \\/ (a1->x) \\/ (a2->x)", "(x->b)->a", "x"]
    f.write_text("\n".join(lines))
    code, out, _ = run(capsys, "closure-ordinal", "--file", str(f))
    assert code == 0 and out.split() == ["2", "3", "2", "0"]


def test_json_round_trip(capsys):
    code, out, _ = run(capsys, "eliminate", "mu x. (((x->c)->a) \\/ ((x->d)->b))",
                       "--format", "json", "--trace", "--verify")
    doc = json.loads(out)
    assert code == 0
    assert json.loads(json.dumps(doc)) == doc
    assert parse(doc["output"]).fp_free
    for step in doc["trace"]:
        assert set(step) == {"step", "rule", "input", "output", "obligations", "verified"}
        assert step["verified"] is not False
        parse(step["input"])
        parse(step["output"])


def test_verify_flag_does_not_change_output(capsys):
    f = "mu x. ((x -> c) -> (a \\/ x))"
    assert run(capsys, "eliminate", f)[1] == run(capsys, "eliminate", f, "--verify")[1]


def test_bench_csv_columns(capsys):
    code, out, _ = run(capsys, "bench", "--family", "phi_n", "--param", "1-3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [int(r["cl"]) for r in rows] == [2, 3, 4]
    assert {"formula", "cl", "rho", "bounds", "wall_time"} <= set(rows[0])
    assert json.loads(rows[0]["bounds"])["disjunctive"] == 2


def test_bench_seeded(capsys):
    a = run(capsys, "bench", "--family", "random-disjunctive", "--count", "3", "--seed", "4",
            "--format", "json")[1]
    b = run(capsys, "bench", "--family", "random-disjunctive", "--count", "3", "--seed", "4",
            "--format", "json")[1]
    strip = lambda s: [{k: v for k, v in r.items() if k != "wall_time"} for r in json.loads(s)]  # noqa: E731
    assert strip(a) == strip(b)


def test_bench_chain_reports_model_steps(capsys):
    code, out, _ = run(capsys, "bench", "--family", "chain", "--param", "2-3", "--format", "json",
                       "--no-rho")
    assert [r["model_steps"] for r in json.loads(out)] == [2, 3]


def test_ruitenburg_and_verify_bounds(capsys):
    assert run(capsys, "ruitenburg", "(x->b)->a")[1].strip() == "2"
    code, out, _ = run(capsys, "verify-bounds", "(x->b)->a", "--format", "json")
    assert code == 0 and json.loads(out)["cl"] == 2


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", "(a \\/ x) /\\ (b \\/ x)", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["x_free_part"] == "T" and len(doc["disjuncts"]) == 2


def test_game(tmp_path, capsys):
    code, out, _ = run(capsys, "game", "--adversarial", "3", "--rounds", "2")
    assert code == 1 and "losing play" in out
    f = tmp_path / "star.txt"
    f.write_text("(a1 -> b1 \\/ x) \\/ (a2 -> x)\nb2 \\/ x\n")
    code, out, _ = run(capsys, "game", "--conjuncts", str(f), "--check", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["eve_wins_all"] and doc["closed_form_below_iterate"]


def test_model_check(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("3\n0<1\n0<2\n")
    code, out, _ = run(capsys, "model-check", "((a->b)->a)->a", "--poset", str(p))
    assert code == 1 and out.startswith("not valid")
    code, out, _ = run(capsys, "model-check", "(mu x. (a \\/ x)) -> a", "--poset", str(p))
    assert code == 0 and out.strip() == "valid"
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n0<1\n1<0\n")
    assert run(capsys, "model-check", "a", "--poset", str(bad))[0] == 2


@pytest.mark.parametrize("cmd", ["eliminate", "prove", "normalize", "closure-ordinal",
                                 "ruitenburg", "verify-bounds"])
def test_every_formula_command_reads_files(tmp_path, capsys, cmd):
    f = tmp_path / "one.txt"
    f.write_text("b \\/ (a -> x)\n")
    assert run(capsys, cmd, "--file", str(f))[0] in (0, 1)
