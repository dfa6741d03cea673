"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s``; the lines are also
collected into the terminal summary.
"""
import time

import numpy as np
import pytest

from conftest import grid_config, line_config, make_config
from rcmap import cli
from rcmap.circuit import Gate, build_circuit, emit_unscheduled
from rcmap.config import builtin_surface17
from rcmap.decompose import expand
from rcmap.generate import clean_ancilla_suite, random_circuit
from rcmap.metrics import overhead
from rcmap.oracle import equivalent, phase_distance, unitary
from rcmap.pipeline import MapOptions, map_circuit, map_once
from rcmap.placement import exhaustive_qap, place_qap
from rcmap.qodg import build_qodg
from rcmap.scheduler import schedule_alap, schedule_asap, validate_schedule

S17 = builtin_surface17()
STRATEGIES = ("trivial", "minpath", "qmap")


def _log_uniform(rng, lo, hi):
    return int(round(np.exp(rng.uniform(np.log(lo), np.log(hi)))))


@pytest.mark.slow
def test_criterion_1_schedule_legality(acceptance):
    # gate counts are drawn log-uniformly over 5..300 and qmap scores movements
    # against the last 64 mapped gates, which keeps 3000 mappings under 5 minutes
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    circuits, violations = 1000, []
    for i in range(circuits):
        n, m = int(rng.integers(2, 13)), _log_uniform(rng, 5, 300)
        c = random_circuit(n, m, int(rng.integers(2 ** 32)), measure=bool(i % 4 == 0))
        for strategy in STRATEGIES:
            res = map_circuit(c, S17, MapOptions(strategy, seed=i, lookback=64))
            for kind, sched in (("asap", schedule_asap(res.qodg, S17)), ("alap", schedule_alap(res.qodg, S17))):
                v = validate_schedule(res.circuit, res.qodg, sched, S17)
                if v is not None:
                    violations.append((i, strategy, kind, str(v)))
    elapsed = time.perf_counter() - t0
    ok = not violations and elapsed < 300
    acceptance(1, ok, f"{circuits} circuits x {len(STRATEGIES)} strategies x ASAP/ALAP, "
                      f"{len(violations)} violations, {elapsed:.0f}s (limit 300s)")
    assert not violations, violations[:3]
    assert elapsed < 300


REFERENCE = {
    "h": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
    "z": np.diag([1, -1]),
    "s": np.diag([1, 1j]),
    "sdag": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdag": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "cnot": np.eye(4)[[0, 1, 3, 2]],
    "swap": np.eye(4)[[0, 2, 1, 3]],
}
# CNOT(a->b) then CNOT(b->a), built from projectors on the first operand
_P0, _P1, _X = np.diag([1, 0]), np.diag([0, 1]), np.array([[0, 1], [1, 0]])
REFERENCE["move"] = (np.kron(np.eye(2), _P0) + np.kron(_X, _P1)) @ REFERENCE["cnot"]


def test_criterion_2_decomposition_fidelity(acceptance):
    worst, counts = 0.0, {}
    for name, ref in REFERENCE.items():
        arity = S17.arity(name)
        prims = [Gate(i, n, ops) for i, (n, ops) in enumerate(expand(S17, name, tuple(range(arity))))]
        worst = max(worst, phase_distance(ref, unitary(prims, arity, S17)))
        counts[name] = (len(prims), sum(g.name == "cz" for g in prims))
    pinned = counts["cnot"] == (3, 1) and counts["swap"] == (9, 3) and counts["move"] == (6, 2)
    ok = worst < 1e-12 and pinned
    acceptance(2, ok, f"{len(REFERENCE)} rules, worst phase distance {worst:.1e} (tol 1e-12); "
                      f"cnot/swap/move = {counts['cnot'][0]}/{counts['swap'][0]}/{counts['move'][0]} primitives")
    assert ok


@pytest.mark.slow
def test_criterion_3_end_to_end_equivalence(acceptance):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst, failures = 1.0, 0
    for i in range(200):
        n, m = int(rng.integers(2, 7)), int(rng.integers(5, 60))
        c = random_circuit(n, m, int(rng.integers(2 ** 32)))
        for strategy in STRATEGIES:
            res = map_circuit(c, S17, MapOptions(strategy, seed=i))
            order = sorted(res.circuit.gates, key=lambda g: (res.schedule.start[g.id], g.id))
            check = equivalent(c, order, res.routing.initial, res.routing.final, S17, seed=i)
            worst = min(worst, check.fidelity)
            failures += not (check.fidelity > 1 - 1e-9)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 600
    acceptance(3, ok, f"200 circuits x {len(STRATEGIES)} strategies, worst fidelity {worst:.12f}, "
                      f"{failures} failures, {elapsed:.0f}s (limit 600s)")
    assert ok


def _asap(ops):
    c = build_circuit(17, ops)
    g = build_qodg(c, S17)
    s = schedule_asap(g, S17)
    assert validate_schedule(c, g, s, S17) is None
    return s.latency, [s.start[i] for i in range(len(ops))]


def test_criterion_4_classical_control(acceptance):
    a = _asap([("x", 7), ("x", 8)])
    b = _asap([("x", 7), ("y", 8)])
    c = _asap([("measure", 13), ("measure", 16)])
    c_stagger = _asap([("x", 13), ("measure", 13), ("measure", 16)])
    d = _asap([("cz", 3, 0), ("x", 6)])
    checks = {
        "a": a == (1, [0, 0]),
        "b": b[0] == 2,
        "c": c == (15, [0, 0]) and c_stagger[1][2] == 0 and c_stagger[1][1] >= 15,
        "d": d[0] == 3 and (d[1][1] >= d[1][0] + 2 or d[1][0] >= d[1][1] + 1),
    }
    ok = all(checks.values())
    acceptance(4, ok, "x7||x8 lat 1: {a}; x7,y8 lat 2: {b}; measure13||16 lat 15 + stagger >= 15: {c}; "
                      "x6 vs cz(3,0) disjoint: {d}".format(**{k: "ok" if v else "FAILED" for k, v in checks.items()}))
    assert ok


def test_criterion_5_swap_vs_move(acceptance):
    # trivial and minpath choose movements without looking at their cost, so the
    # comparison isolates MOVE; qmap may spend extra movements to cut latency and
    # is reported but not required to win on gate count
    wins = {s: 0 for s in STRATEGIES}
    best = {s: 0.0 for s in STRATEGIES}
    exact_saving, instances = True, 0
    for c, vp in clean_ancilla_suite():
        instances += 1
        for strategy in STRATEGIES:
            runs = {mv: map_once(c, S17, MapOptions(strategy, seed=1, use_moves=mv, optimize="none"), vp.copy(), 1)
                    for mv in (True, False)}
            with_moves, swaps_only = runs[True].stats, runs[False].stats
            wins[strategy] += with_moves.gates < swaps_only.gates
            best[strategy] = max(best[strategy], 1 - with_moves.gates / swaps_only.gates)
            if strategy == "trivial":
                # identical path choices, so each MOVE saves exactly three primitives
                exact_saving &= swaps_only.gates - with_moves.gates == 3 * with_moves.moves > 0
    ok = wins["trivial"] == wins["minpath"] == instances and exact_saving
    summary = ", ".join(f"{s} {wins[s]}/{instances} (max -{100 * best[s]:.1f}%)" for s in STRATEGIES)
    acceptance(5, ok, f"MOVE strictly fewer gates: {summary}; "
                      f"3-gate saving per MOVE: {'ok' if exact_saving else 'FAILED'}")
    assert ok


@pytest.mark.slow
def test_criterion_6_qmap_vs_minpath(acceptance):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    wins = 0
    for i in range(50):
        n, m = int(rng.integers(8, 13)), int(rng.integers(50, 201))
        c = random_circuit(n, m, int(rng.integers(2 ** 32)))
        q = map_circuit(c, S17, MapOptions("qmap", seed=i, restarts=5))
        p = map_circuit(c, S17, MapOptions("minpath", seed=i, restarts=5))
        wins += q.stats.latency <= p.stats.latency
    elapsed = time.perf_counter() - t0
    ok = wins >= 40 and elapsed < 1800
    acceptance(6, ok, f"qmap latency <= minpath on {wins}/50 circuits ({2 * wins}%, need 80%), "
                      f"{elapsed:.0f}s (limit 1800s)")
    assert ok


def test_criterion_7_overhead_arithmetic(acceptance):
    value = overhead(5, 18)
    ok = value == 2.6
    acceptance(7, ok, f"overhead(5 -> 18) = {value!r} (expected 2.6)")
    assert ok


def test_criterion_8_placement_optimality(acceptance):
    rng = np.random.default_rng(8)
    topologies = [line_config(9), grid_config(3, 3), make_config(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)])]
    deviations = 0
    for i in range(30):
        config = topologies[i % len(topologies)]
        m = int(rng.integers(2, 7))
        weights = {}
        for _ in range(int(rng.integers(1, 10))):
            a, b = sorted(int(x) for x in rng.choice(m, size=2, replace=False))
            weights[(a, b)] = weights.get((a, b), 0) + int(rng.integers(1, 4))
        res = place_qap(weights, config)
        best, _ = exhaustive_qap(weights, config)
        deviations += (not res.exact) or res.cost != best
    ok = deviations == 0
    acceptance(8, ok, f"30 instances (<= 6 virtual, <= 9 physical), {deviations} deviations from exhaustive search")
    assert ok


def test_criterion_9_determinism(acceptance, tmp_path):
    src = tmp_path / "in.qasm"
    src.write_text(emit_unscheduled(random_circuit(10, 120, 99, measure=True)))
    blobs = []
    for run in range(2):
        out, csv, js = (tmp_path / f"{run}.{ext}" for ext in ("sched", "csv", "json"))
        code = cli.main(["map", "--in", str(src), "--strategy", "qmap", "--seed", "5", "--restarts", "3",
                         "--out", str(out), "--metrics", str(csv), "--metrics-json", str(js), "--no-timing"])
        assert code == 0
        blobs.append((out.read_bytes(), csv.read_bytes(), js.read_bytes()))
    ok = blobs[0] == blobs[1]
    acceptance(9, ok, "two identical runs: scheduled output, CSV and JSON metrics byte-identical"
               if ok else "outputs differ between identical runs")
    assert ok
