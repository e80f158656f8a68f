import json
import subprocess
import sys

import pytest

from mvlam.belnap import majority_table
from mvlam.circuit import build_const_unary, build_literal, build_unary
from mvlam.cli import main
from mvlam.datasets import load_table
from mvlam.table import FunctionTable
from mvlam.terms import print_term


def write_table(path, table):
    path.write_text(json.dumps(table.to_json()))
    return str(path)


def lines(out):
    return [json.loads(x) for x in out.strip().splitlines()]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_belnap_oplus(tmp_path, capsys):
    table = write_table(tmp_path / "oplus.json", load_table("belnap_oplus"))
    term, cert = tmp_path / "t.lam", tmp_path / "c.json"
    code, out, err = run(capsys, "build", table, "--style", "binary",
                         "--term-out", str(term), "--cert-out", str(cert))
    assert code == 0
    rep = lines(out)[0]
    assert rep["checks"] and rep["agreement"] == rep["total"] == 16
    assert "T4 -> T4 -> T4" in err
    code, out, _ = run(capsys, "check", str(term), str(cert), "T4 -> T4 -> T4")
    assert code == 0 and lines(out)[0]["ok"]
    code, out, _ = run(capsys, "verify", str(term), table)
    assert code == 0 and lines(out)[0]["agreement"] == 16


def test_build_addmod(tmp_path, capsys):
    t = FunctionTable.from_function(lambda a, b: (a + b) % 5, (5, 5), 5)
    table = write_table(tmp_path / "add.json", t)
    code, out, _ = run(capsys, "build", table, "--style", "binary", "--opt", "addmod")
    rep = lines(out)[0]
    assert code == 0 and rep["const_count"] == 5 and rep["agreement"] == 25


def test_build_unary_round_trip(tmp_path, capsys):
    table = write_table(tmp_path / "id.json", FunctionTable((3,), 3, (0, 1, 2)))
    term, cert = tmp_path / "t.lam", tmp_path / "c.json"
    code, _, _ = run(capsys, "build", table, "--style", "unary",
                     "--term-out", str(term), "--cert-out", str(cert))
    assert code == 0
    code, out, err = run(capsys, "check", str(term), str(cert), "T3 -> T3")
    assert code == 0 and "PASS" in err


@pytest.mark.parametrize("style", ["circuit-dnf", "inductive", "hybrid"])
def test_build_styles_then_check_and_verify(tmp_path, capsys, style):
    t = FunctionTable((2, 2, 2), 2, (0, 1, 1, 0, 1, 0, 0, 1))
    table = write_table(tmp_path / "x.json", t)
    term, cert = tmp_path / "t.lam", tmp_path / "c.json"
    code, _, _ = run(capsys, "build", table, "--style", style,
                     "--term-out", str(term), "--cert-out", str(cert))
    assert code == 0
    assert run(capsys, "check", str(term), str(cert), "T2 -> T2 -> T2 -> T2")[0] == 0
    assert run(capsys, "verify", str(term), table, "--jobs", "2")[0] == 0


def test_build_bad_table(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"inputs": [2], "output": 2, "entries": [0, 1, 1]}))
    assert run(capsys, "build", str(bad))[0] == 2
    bad.write_text("{")
    assert run(capsys, "build", str(bad))[0] == 2
    assert run(capsys, "build", str(tmp_path / "missing.json"))[0] == 2


def test_build_style_arity_mismatch(tmp_path, capsys):
    table = write_table(tmp_path / "u.json", FunctionTable((2, 2), 2, (0, 0, 0, 1)))
    assert run(capsys, "build", table, "--style", "unary")[0] == 2


def _dump(tmp_path, built, name):
    term, cert = tmp_path / f"{name}.lam", tmp_path / f"{name}.json"
    term.write_text(print_term(built.term))
    cert.write_text(built.certificate.dumps())
    return str(term), str(cert)


def test_check_mono(tmp_path, capsys):
    term, cert = _dump(tmp_path, build_const_unary(1, 3), "c")
    code, out, err = run(capsys, "check", term, cert, "T3->T3", "--mono")
    assert code == 0 and lines(out)[0]["monomorphic"] is True
    assert "PASS" in err and "monomorphic" in err
    term, cert = _dump(tmp_path, build_unary(FunctionTable((3,), 3, (1, 2, 0))), "g")
    code, out, err = run(capsys, "check", term, cert, "T3->T3", "--mono")
    assert code == 0 and lines(out)[0]["monomorphic"] is False
    assert "not monomorphic" in err


def test_check_duplicated_variable(tmp_path, capsys):
    term, cert = tmp_path / "t.lam", tmp_path / "c.json"
    term.write_text("fn x => x x")
    cert.write_text("[]")
    code, out, err = run(capsys, "check", str(term), str(cert), "forall 'a. 'a -> 'a")
    assert code == 1
    assert lines(out)[0]["error"] == "LinearityError"
    assert "FAIL LinearityError" in err


def test_check_parse_errors(tmp_path, capsys):
    term, cert = tmp_path / "t.lam", tmp_path / "c.json"
    term.write_text("fn x =>")
    cert.write_text("[]")
    assert run(capsys, "check", str(term), str(cert), "T2")[0] == 2
    term.write_text("fn x => x")
    cert.write_text("nope")
    assert run(capsys, "check", str(term), str(cert), "T2")[0] == 2
    cert.write_text("[]")
    assert run(capsys, "check", str(term), str(cert), "T")[0] == 2


def test_verify_literal_and_corrupted(tmp_path, capsys):
    lit = FunctionTable((5,), 5, (0, 0, 0, 4, 0))
    term, _ = _dump(tmp_path, build_literal(3, 4, 5), "lit")
    table = write_table(tmp_path / "lit.json", lit)
    code, out, err = run(capsys, "verify", term, table)
    assert code == 0 and "5/5" in err
    wrong = write_table(tmp_path / "wrong.json", FunctionTable((5,), 5, (0, 0, 1, 4, 0)))
    code, out, err = run(capsys, "verify", term, wrong)
    assert code == 1
    rep = lines(out)[0]
    assert rep["agreement"] == 4
    assert rep["mismatches"] == [{"args": [2], "got": 0, "expected": 1}]
    assert "mismatch at [2]" in err


def test_verify_jobs_deterministic(tmp_path, capsys):
    term, _ = _dump(tmp_path, build_literal(1, 2, 3), "lit")
    table = write_table(tmp_path / "lit.json", FunctionTable((3,), 3, (0, 2, 0)))
    outs = [run(capsys, "verify", term, table, "--jobs", str(j))[1] for j in (1, 2, 3)]
    assert outs[0] == outs[1] == outs[2]
    assert run(capsys, "verify", term, table, "--jobs", "0")[0] == 2


def test_bench_const(tmp_path, capsys):
    out_file = tmp_path / "bench.json"
    code, out, _ = run(capsys, "bench", "const-vs-I", "--radix", "3", "--out", str(out_file))
    rep = lines(out)[0]
    assert code == 0
    assert rep["identity_beta1"] == 1 and rep["paper_claim"] == 7
    assert rep["within_tolerance"] and rep["measured_formula"] == "2r+2"
    assert json.loads(out_file.read_text()) == rep


def test_bench_matrix(capsys):
    code, out, _ = run(capsys, "bench", "matrix-opt")
    reps = lines(out)[0]["reports"]
    assert code == 0
    assert (reps[0]["unoptimized_consts"], reps[0]["optimized_consts"]) == (25, 13)
    assert (reps[1]["unoptimized_consts"], reps[1]["optimized_consts"]) == (25, 25)


def test_bench_addmod(capsys):
    code, out, _ = run(capsys, "bench", "addmod", "--radix", "4")
    rep = lines(out)[0]
    assert code == 0 and rep["agree"] and rep["add_mod_aux_terms"] == 4


def test_bench_unknown_scenario(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bench", "nope"])
    assert exc.value.code == 2


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "a", "b", "--fast"])
    assert exc.value.code == 2


@pytest.mark.parametrize("r,total,canonical", [(1, 1, 1), (2, 2, 2), (3, 6, 3)])
def test_inhabitants(capsys, r, total, canonical):
    code, out, err = run(capsys, "inhabitants", "--radix", str(r))
    rows = lines(out)
    assert code == 0 and len(rows) == total
    assert sum(x["canonical"] for x in rows) == canonical
    assert sorted(x["value"] for x in rows if x["canonical"]) == list(range(r))


def test_inhabitants_guard(capsys):
    assert run(capsys, "inhabitants", "--radix", "7")[0] == 2


def test_belnap_merges(capsys):
    code, out, _ = run(capsys, "belnap", "merges")
    rows = lines(out)
    assert code == 0 and rows[0] == {"pair": [3, 4], "status": "ok"}


def test_belnap_majority(tmp_path, capsys):
    term = tmp_path / "maj.lam"
    code, out, err = run(capsys, "belnap", "majority", "--merge", "--term-out", str(term))
    rep = lines(out)[0]
    assert code == 0 and rep["agreement"] == 256 and rep["subfunctions"] == 10
    assert rep["options"] == {"merge": True, "dontcare": False, "row_opt": False}
    table = tmp_path / "maj.json"
    write_table(table, majority_table())
    code, out, err = run(capsys, "verify", str(term), str(table), "--jobs", "2")
    assert code == 0 and "256/256" in err


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "mvlam.cli", "inhabitants", "--radix", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert len(res.stdout.strip().splitlines()) == 2
