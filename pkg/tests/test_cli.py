import pytest

from rcmap import cli
from rcmap.circuit import emit_unscheduled, parse_circuit
from rcmap.config import builtin_surface17, dump_config
from rcmap.generate import random_circuit
from rcmap.metrics import read_csv_report
from rcmap.oracle import Equivalence
from rcmap.scheduler import Violation

SMALL = """qubits 4
h q0
cnot q0, q3
t q1
cnot q1, q2
cnot q3, q1
measure q0
"""


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "c.qasm"
    path.write_text(SMALL)
    return path


def _parse_bundles(text):
    """Read bundled output back into (start cycle, gate text) pairs."""
    out = []
    for line in text.splitlines():
        if line.startswith("cycle") and not line.endswith("-"):
            t, body = line[len("cycle "):].split(":", 1)
            out += [(int(t), g.strip()) for g in body.strip()[1:-1].split("|")]
    return out


def test_map_smoke(small, tmp_path, capsys):
    out = tmp_path / "c.sched"
    code = cli.main(["map", "--config", "surface17", "--strategy", "qmap", "--seed", "1",
                     "--in", str(small), "--out", str(out)])
    assert code == 0
    assert "latency" in capsys.readouterr().out
    text = out.read_text()
    assert text.splitlines()[0].startswith("cycle 0:")
    assert any(line.startswith("# latency") for line in text.splitlines())
    assert len(_parse_bundles(text)) > 0


def test_map_to_stdout_with_verify_and_dumps(small, tmp_path, capsys):
    dot = tmp_path / "g.dot"
    js = tmp_path / "m.json"
    code = cli.main(["map", "--in", str(small), "--verify", "--dump-qodg", str(dot), "--metrics-json", str(js)])
    captured = capsys.readouterr()
    assert code == 0
    assert "cycle 0:" in captured.out
    assert "verify: fidelity 1.0" in captured.out
    assert dot.read_text().startswith("digraph")
    assert '"strategy": "qmap"' in js.read_text()


def test_config_path(small, tmp_path):
    cfg = tmp_path / "s17.json"
    cfg.write_text(dump_config(builtin_surface17()))
    assert cli.main(["map", "--in", str(small), "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_strategies_differ(tmp_path):
    path = tmp_path / "r.qasm"
    path.write_text(emit_unscheduled(random_circuit(8, 60, 1)))
    rows = {}
    for strategy in ("trivial", "qmap"):
        metrics = tmp_path / f"{strategy}.csv"
        assert cli.main(["map", "--in", str(path), "--strategy", strategy, "--no-timing",
                         "--out", str(tmp_path / f"{strategy}.sched"), "--metrics", str(metrics)]) == 0
        rows[strategy] = read_csv_report(metrics.read_text())[0]
    assert rows["trivial"] != rows["qmap"]


def test_deterministic_output(small, tmp_path):
    outputs = []
    for run in range(2):
        sched, metrics = tmp_path / f"s{run}", tmp_path / f"m{run}.csv"
        cli.main(["map", "--in", str(small), "--seed", "3", "--restarts", "2", "--no-timing",
                  "--out", str(sched), "--metrics", str(metrics)])
        outputs.append((sched.read_bytes(), metrics.read_bytes()))
    assert outputs[0] == outputs[1]


def test_bench_rows(tmp_path, capsys):
    suite = tmp_path / "suite"
    suite.mkdir()
    for i in range(2):
        (suite / f"b{i}.qasm").write_text(emit_unscheduled(random_circuit(5, 20, i)))
    metrics = tmp_path / "out.csv"
    code = cli.main(["bench", "--suite", str(suite), "--strategies", "trivial,minpath,qmap",
                     "--restarts", "2", "--metrics", str(metrics)])
    assert code == 0
    rows = read_csv_report(metrics.read_text())
    assert [(r["name"], r["strategy"]) for r in rows] == [
        (f"b{i}", s) for i in range(2) for s in ("trivial", "minpath", "qmap")
    ]
    assert "name,strategy" in capsys.readouterr().out


def test_usage_errors(tmp_path, small, capsys):
    for argv in (["map"], ["map", "--strategy", "sabre", "--in", str(small)], ["frobnicate"],
                 ["map", "--in", str(small), "--lookback", "-2"]):
        with pytest.raises(SystemExit) as info:
            cli.main(argv)
        assert info.value.code == 1
    assert cli.main(["map", "--in", str(tmp_path / "missing.qasm")]) == 1
    assert cli.main(["bench", "--suite", str(tmp_path), "--strategies", "qmap,nope"]) == 1
    assert cli.main(["bench", "--suite", str(tmp_path / "empty_dir_missing")]) == 1


def test_syntax_error_reports_file_and_line(tmp_path, capsys):
    bad = tmp_path / "bad.qasm"
    bad.write_text("qubits 2\nx q0\nfoo q1\n")
    assert cli.main(["map", "--in", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "bad.qasm" in err and "line 3" in err


def test_failed_verification_exits_2(small, monkeypatch, tmp_path):
    monkeypatch.setattr(cli, "equivalent", lambda *a, **k: Equivalence(False, 0.5))
    assert cli.main(["map", "--in", str(small), "--verify", "--out", str(tmp_path / "o")]) == 2


def test_internal_check_failure_exits_2(small, monkeypatch, tmp_path):
    import rcmap.pipeline as pipeline

    monkeypatch.setattr(pipeline, "validate_schedule", lambda *a: Violation("resource", "forced"))
    out = tmp_path / "never"
    assert cli.main(["map", "--in", str(small), "--out", str(out)]) == 2
    assert not out.exists()


def test_scheduled_output_covers_every_gate(small, tmp_path):
    out = tmp_path / "o"
    cli.main(["map", "--in", str(small), "--strategy", "minpath", "--out", str(out)])
    names = [g.split()[0] for _, g in _parse_bundles(out.read_text())]
    assert "measure" in names
    assert all(builtin_surface17().is_primitive(n) for n in names)
    assert parse_circuit(SMALL).qubit_count == 4
