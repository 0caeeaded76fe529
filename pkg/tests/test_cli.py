import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from conftest import EX1_PATH, needs_z3
from modelgen import random_model_text
from scvc.cli import run


def test_check_oracle_ex1(capsys):
    assert run(["check", str(EX1_PATH), "--oracle", "--bound", "200"]) == 0
    out = capsys.readouterr().out
    assert "E_0" in out and "3 valid" in out


def test_invariants_prints_golden_ai(capsys):
    assert run(["invariants", str(EX1_PATH)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "ai(S) = (root = R ∧ x > 1) ∧ (r = S ∧ x ≤ 100)" in lines
    assert "ai(U) = (root = U ∧ x > 6) ∧ ((a = M ∧ x < 111) ∧ (b = N ∧ x ≠ 15))" in lines


def test_parse_broken_file(tmp_path, capsys):
    bad = tmp_path / "broken.sch"
    bad.write_text("statechart b\ninit A\nstate A basic inv \"x >\"\n")
    assert run(["parse", str(bad)]) == 2
    err = capsys.readouterr().err
    assert f"{bad}:3:" in err and "syntax error" in err


def test_parse_ok(capsys):
    assert run(["parse", str(EX1_PATH)]) == 0
    assert "ok" in capsys.readouterr().out


def test_usage_errors(capsys):
    assert run([]) == 2
    assert run(["frobnicate", str(EX1_PATH)]) == 2
    assert run(["check", str(EX1_PATH), "--bound", "0"]) == 2
    assert run(["check", "/no/such/file.sch"]) == 2


def test_invalid_exit_code(tmp_path, ex1_text, capsys):
    m = tmp_path / "mut.sch"
    m.write_text(ex1_text.replace("x != 15", "x != 12"))
    assert run(["check", str(m), "--oracle", "--format", "json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["vcs"][0]["status"] == "invalid"
    assert data["vcs"][0]["counterexample"]["x"] == 2


def test_cyclic_broadcast_is_model_error(tmp_path, capsys):
    m = tmp_path / "cyc.sch"
    m.write_text("statechart c\ninit A\nstate A basic\n"
                 "on E from A to A do { broadcast F }\non F from A to A do { broadcast E }\n")
    assert run(["check", str(m), "--oracle"]) == 2
    assert "cyclic broadcast" in capsys.readouterr().err


def test_solver_error_exit_code(capsys):
    assert run(["check", str(EX1_PATH), "--solver", "no-such-solver-xyz {file}"]) == 3
    assert "SolverSpawnError" in capsys.readouterr().err


def test_env_solver_default(monkeypatch, capsys):
    monkeypatch.setenv("SCVC_SOLVER", "no-such-solver-xyz {file}")
    assert run(["check", str(EX1_PATH)]) == 3
    monkeypatch.delenv("SCVC_SOLVER")
    assert run(["check", str(EX1_PATH)]) == 0
    assert "falling back" in capsys.readouterr().err


def test_strict_unknown(capsys):
    args = ["check", str(EX1_PATH), "--solver", "sh -c 'echo unknown' {file}"]
    assert run(args) == 0
    assert run(args + ["--strict-unknown"]) == 1


def test_out_dir(tmp_path, capsys):
    assert run(["check", str(EX1_PATH), "--oracle", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["E_0.smt2", "E_1.smt2", "E_2.smt2", "report.json"]
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["model"] == "ex1" and len(data["vcs"]) == 3


def test_vcgen_dump(capsys):
    assert run(["vcgen", str(EX1_PATH)]) == 0
    out = capsys.readouterr().out
    assert ("E_0: sources {R,S} | guard x ≠ 5 | action x := x + 10 || root := U || "
            "a := M || b := N | targets {U,M,N}") in out
    assert "== semantics, raw ==" in out and "== semantics, expanded ==" in out


def test_path_both(capsys):
    assert run(["vcgen", str(EX1_PATH), "--path", "both"]) == 0
    assert "== event-code, expanded ==" in capsys.readouterr().out
    assert run(["check", str(EX1_PATH), "--path", "both", "--oracle"]) == 0


def test_emit_init_vc(capsys):
    assert run(["check", str(EX1_PATH), "--oracle", "--bound", "5", "--emit-init-vc",
                "--format", "json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["vcs"][0]["id"] == "init_0"


def report_shape_ok(data):
    assert isinstance(data["model"], str) and isinstance(data["vcs"], list)
    for vc in data["vcs"]:
        assert {"id", "event", "sources", "targets", "guard", "status"} <= vc.keys()
        assert vc["status"] in ("valid", "invalid", "unknown", "error")
        assert ("counterexample" in vc) == (vc["status"] == "invalid")


@given(st.integers(0, 5000), st.booleans())
@settings(max_examples=25, deadline=None)
def test_json_output_is_schema_valid(seed, bcast):
    import contextlib
    import io
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".sch", delete=False) as fh:
        fh.write(random_model_text(seed, broadcasts=bcast))
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = run(["check", fh.name, "--oracle", "--bound", "4", "--format", "json"])
    data = json.loads(buf.getvalue())
    report_shape_ok(data)
    statuses = {vc["status"] for vc in data["vcs"]}
    expected = 3 if "error" in statuses else 1 if "invalid" in statuses else 0
    assert code == expected


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "scvc", "invariants", str(EX1_PATH),
                           "--format", "json"], capture_output=True, text=True)
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    s = next(r for r in data["states"] if r["state"] == "S")
    assert s["ai"]["text"] == "(root = R ∧ x > 1) ∧ (r = S ∧ x ≤ 100)"
    assert s["ai"]["ast"]["op"] == "and"


@needs_z3
def test_check_with_z3(capsys):
    assert run(["check", str(EX1_PATH), "--solver", "z3 {file}"]) == 0


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_formats_for_every_subcommand(fmt, capsys):
    for cmd in ("parse", "invariants", "vcgen", "check"):
        assert run([cmd, str(EX1_PATH), "--oracle", "--format", fmt]) == 0
        out = capsys.readouterr().out
        if fmt == "json":
            json.loads(out)
