"""Command-line interface: report shapes, exit codes, files, CSV."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import jsonschema
import pytest

from qddsim.circuit import emit_qasm
from qddsim.cli import main

from conftest import LEADING, MOTIVATING, bell_pair

SCHEMA = json.loads(
    (Path(__file__).resolve().parents[1]
     / "src" / "qddsim" / "schema" / "run_report.schema.json").read_text()
)


@pytest.fixture
def qasm_file(tmp_path):
    def write(circuit, name="circ.qasm"):
        path = tmp_path / name
        path.write_text(emit_qasm(circuit))
        return str(path)

    return write


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


# -- simulate --------------------------------------------------------------

def test_simulate_report_validates(qasm_file, capsys):
    code, report = run_json(capsys, ["simulate", qasm_file(MOTIVATING)])
    assert code == 0
    jsonschema.validate(report, SCHEMA)
    assert report["mode"] == "limdd"
    assert report["policy"] == {
        "coeffs": "exact", "tolerance": 0.0, "norm_rule": "low",
    }
    assert report["circuit"]["n_qubits"] == 2
    assert report["circuit"]["gates_raw"] == 6
    assert report["circuit"]["t_count"] == 2
    assert report["measurement"]["p0_float"] == 1.0
    assert report["checks"] == {"coeff_bound": None, "width_bound": None}
    assert report["violations"] == []
    assert report["bound_report"] is None


def test_simulate_float_backend_fields(qasm_file, capsys):
    code, report = run_json(capsys, [
        "simulate", qasm_file(LEADING), "--coeffs", "float", "--backend", "evdd",
    ])
    assert code == 0
    jsonschema.validate(report, SCHEMA)
    assert report["mode"] == "evdd"
    assert report["policy"]["tolerance"] == 1e-14
    assert report["measurement"]["p0_symbolic"] is None


def test_simulate_exact_symbolic_probability(qasm_file, capsys):
    code, report = run_json(capsys, [
        "simulate", qasm_file(LEADING), "--check-coeffs", "--check-bounds",
    ])
    assert code == 0
    jsonschema.validate(report, SCHEMA)
    assert report["measurement"]["p0_symbolic"] is not None
    assert report["checks"] == {"coeff_bound": True, "width_bound": True}
    bound = report["bound_report"]
    assert bound is not None and bound["native_ccx"] is True
    assert bound["t_count"] == 2 and bound["limdd_width_bound"] == 4


def test_simulate_sampling_block(qasm_file, capsys):
    code, report = run_json(capsys, [
        "simulate", qasm_file(bell_pair()), "--shots", "40", "--seed", "7",
        "--qubit", "1",
    ])
    assert code == 0
    jsonschema.validate(report, SCHEMA)
    samples = report["measurement"]["samples"]
    assert samples["shots"] == 40 and samples["seed"] == 7
    assert samples["zeros"] + samples["ones"] == 40
    assert report["measurement"]["qubit"] == 1
    # same seed reproduces the same draw
    _, again = run_json(capsys, [
        "simulate", qasm_file(bell_pair()), "--shots", "40", "--seed", "7",
        "--qubit", "1",
    ])
    assert again["measurement"]["samples"] == samples


def test_simulate_stats_and_dot_files(qasm_file, capsys, tmp_path):
    stats = tmp_path / "report.json"
    dot = tmp_path / "diagram.dot"
    code, report = run_json(capsys, [
        "simulate", qasm_file(MOTIVATING),
        "--stats", str(stats), "--dot", str(dot),
    ])
    assert code == 0
    assert json.loads(stats.read_text()) == report
    text = dot.read_text()
    assert text.startswith("digraph")
    assert '"q0"' in text or "q0" in text
    # deterministic output
    main(["simulate", qasm_file(MOTIVATING), "--dot", str(dot)])
    capsys.readouterr()
    assert dot.read_text() == text


def test_simulate_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(emit_qasm(bell_pair())))
    code, report = run_json(capsys, ["simulate", "-"])
    assert code == 0
    assert report["circuit"]["n_qubits"] == 2


def test_simulate_exit_one_on_bad_input(tmp_path, capsys):
    assert main(["simulate", str(tmp_path / "missing.qasm")]) == 1
    bad = tmp_path / "bad.qasm"
    bad.write_text("qreg q[2]; foo q[0];")
    assert main(["simulate", str(bad)]) == 1
    good = tmp_path / "ok.qasm"
    good.write_text("qreg q[2]; h q[0];")
    assert main(["simulate", str(good), "--qubit", "5"]) == 1
    assert main(["simulate", str(good), "--backend", "bogus"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["simulate", str(good), "--coeffs", "exact",
                 "--tolerance", "0.1"]) == 1
    capsys.readouterr()


def test_exit_two_on_check_violation(qasm_file, capsys, monkeypatch):
    import qddsim.gates as gates

    monkeypatch.setattr(gates, "verify_coeff_bound", lambda *a, **k: False)
    code, report = run_json(capsys, [
        "simulate", qasm_file(LEADING), "--check-coeffs",
    ])
    assert code == 2
    assert report["violations"] == ["coeff_bound"]
    assert report["checks"]["coeff_bound"] is False
    jsonschema.validate(report, SCHEMA)


def test_gc_threshold_env(qasm_file, capsys, monkeypatch):
    monkeypatch.setenv("QDD_GC_THRESHOLD", "0.1")
    code, report = run_json(capsys, [
        "simulate", qasm_file(LEADING), "--gc-capacity", "4",
    ])
    assert code == 0 and report["gc_runs"] >= 1
    monkeypatch.setenv("QDD_GC_THRESHOLD", "not-a-number")
    assert main(["simulate", qasm_file(LEADING)]) == 1
    capsys.readouterr()


# -- bounds ----------------------------------------------------------------

def test_bounds_command(qasm_file, capsys):
    code, report = run_json(capsys, ["bounds", qasm_file(LEADING)])
    assert code == 0
    assert report["native_ccx"] is False
    assert report["t_count"] == 2
    assert report["limdd_width_bound"] == 4
    assert len(report["per_gate"]) == len(LEADING.gates)
    code, native = run_json(capsys, [
        "bounds", qasm_file(LEADING), "--native-ccx",
    ])
    assert code == 0 and native["native_ccx"] is True


# -- compare ---------------------------------------------------------------

def test_compare_command(qasm_file, capsys):
    code, report = run_json(capsys, [
        "compare", qasm_file(MOTIVATING), "--backend", "evdd",
    ])
    assert code == 0
    assert report["mode"] == "evdd"
    assert report["tolerance"] == 1e-14
    assert report["incorrect"] is False
    assert report["p0_abs_delta"] <= 1e-9
    assert isinstance(report["node_delta"], int)
    for side in ("exact", "float"):
        jsonschema.validate(report[side], SCHEMA)
    assert report["exact"]["policy"]["coeffs"] == "exact"
    assert report["float"]["policy"]["coeffs"] == "float"


# -- bench -----------------------------------------------------------------

def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bench_stdout_rows(capsys):
    code = main(["bench", "wstate", "--sizes", "2,4"])
    out = capsys.readouterr().out
    assert code == 0
    rows = read_csv(out)
    # sizes x seeds x {exact, float}
    assert len(rows) == 4
    assert [r["name"] for r in rows] == [
        "wstate-2", "wstate-2", "wstate-4", "wstate-4",
    ]
    assert {r["coeffs"] for r in rows} == {"exact", "float"}
    assert all(r["seed"] == "" for r in rows)
    assert rows[0]["p0"].startswith("0.5")
    assert rows[2]["p0"].startswith("0.75")
    w2 = next(r for r in rows if r["name"] == "wstate-2")
    assert w2["final_nodes"] == "3" and w2["n_qubits"] == "2"


def test_bench_append_semantics(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "random", "--sizes", "3", "--depth", "12",
                 "--seeds", "2", "--out", str(out)]) == 0
    first = out.read_text().splitlines()
    assert len(first) == 1 + 4  # header + 1 size x 2 seeds x 2 policies
    assert main(["bench", "random", "--sizes", "3", "--depth", "12",
                 "--seeds", "1", "--out", str(out)]) == 0
    second = out.read_text().splitlines()
    assert len(second) == 1 + 4 + 2  # appended without a second header
    assert second[: len(first)] == first
    rows = read_csv(out.read_text())
    assert rows[0]["name"] == "random-3-d12"
    assert {r["seed"] for r in rows} == {"0", "1"}
    capsys.readouterr()


def test_bench_grover_family(capsys):
    code = main(["bench", "grover", "--sizes", "2", "--seeds", "2"])
    out = capsys.readouterr().out
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 4
    assert all(r["name"] == "grover-2" for r in rows)
    assert {r["seed"] for r in rows} == {"0", "1"}


def test_bench_usage_errors(capsys):
    assert main(["bench", "wstate", "--sizes", "two"]) == 1
    assert main(["bench", "wstate", "--sizes", ""]) == 1
    assert main(["bench", "wstate", "--sizes", "2", "--seeds", "0"]) == 1
    assert main(["bench", "wstate", "--sizes", "3"]) == 1  # not a power of two
    capsys.readouterr()
