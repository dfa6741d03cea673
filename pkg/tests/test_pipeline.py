import pytest

from rcmap.circuit import build_circuit
from rcmap.config import builtin_surface17
from rcmap.generate import random_circuit
from rcmap.oracle import equivalent
from rcmap.pipeline import MapOptions, PipelineError, map_circuit, prepare, restart_seed
from rcmap.scheduler import Violation, validate_schedule

S17 = builtin_surface17()


def test_defaults_per_strategy():
    assert MapOptions("trivial").resolved_placement() == "trivial"
    assert MapOptions("trivial").resolved_optimize() == "none"
    assert MapOptions("qmap").resolved_placement() == "qap"
    assert MapOptions("qmap").resolved_optimize() == "both"


def test_restart_seeds():
    assert restart_seed(7, 0) == 7
    assert len({restart_seed(7, r) for r in range(5)}) == 5


def test_prepare_lowers_single_qubit_aliases_only():
    c = build_circuit(2, [("h", 0), ("cnot", 0, 1), ("x", 1), ("x", 1)])
    assert [g.name for g in prepare(c, S17, "none").gates] == ["ry90", "x", "cnot", "x", "x"]
    assert [g.name for g in prepare(c, S17, "pre").gates] == ["ry90", "x", "cnot"]


@pytest.mark.parametrize("strategy", ["trivial", "minpath", "qmap"])
def test_output_is_primitive_legal_and_equivalent(strategy):
    c = random_circuit(5, 40, 3)
    res = map_circuit(c, S17, MapOptions(strategy, seed=2))
    assert all(S17.is_primitive(g.name) for g in res.circuit.gates)
    assert validate_schedule(res.circuit, res.qodg, res.schedule, S17) is None
    assert res.stats.latency == res.schedule.latency
    assert equivalent(c, res.circuit, res.routing.initial, res.routing.final, S17)


def test_best_of_restarts_is_no_worse():
    c = random_circuit(9, 80, 5)
    single = map_circuit(c, S17, MapOptions("minpath", seed=4))
    best = map_circuit(c, S17, MapOptions("minpath", seed=4, restarts=4))
    assert (best.stats.latency, best.stats.gates) <= (single.stats.latency, single.stats.gates)


def test_internal_check_failure_raises(monkeypatch):
    import rcmap.pipeline as pipeline

    monkeypatch.setattr(pipeline, "validate_schedule", lambda *a: Violation("resource", "forced"))
    with pytest.raises(PipelineError, match="forced"):
        map_circuit(random_circuit(3, 5, 0), S17)


def test_no_moves_option():
    c = random_circuit(6, 60, 8)
    res = map_circuit(c, S17, MapOptions("qmap", use_moves=False))
    assert res.stats.moves == 0
