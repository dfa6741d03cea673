from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import HealthCheck, settings

from rcmap.config import (
    HardwareConfig,
    builtin_surface17,
    config_from_tree,
    default_decompositions,
    default_gate_table,
)

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_config(qubit_count: int, undirected, awgs=None, feedlines=None) -> HardwareConfig:
    """Small test processor: every qubit on its own AWG/feedline unless told otherwise.

    CZs conflict only through shared endpoints; nothing is detuned.
    """
    directed = [e for a, b in undirected for e in ((a, b), (b, a))]
    conflicts = {e: set() for e in directed}
    for e, f in combinations(directed, 2):
        if set(e) & set(f):
            conflicts[e].add(f)
            conflicts[f].add(e)
    tree = {
        "qubit_count": qubit_count,
        "cycle_time_ns": 20,
        "gates": default_gate_table(),
        "edges": [list(e) for e in directed],
        "decompositions": default_decompositions(),
        "awgs": awgs if awgs is not None else [[q] for q in range(qubit_count)],
        "feedlines": feedlines if feedlines is not None else [[q] for q in range(qubit_count)],
        "cz_edge_conflicts": {f"{a},{b}": [list(x) for x in sorted(v)] for (a, b), v in conflicts.items()},
        "cz_detuned_qubits": {f"{a},{b}": [] for a, b in directed},
    }
    return config_from_tree(tree)


def line_config(n: int) -> HardwareConfig:
    return make_config(n, [(i, i + 1) for i in range(n - 1)])


def grid_config(rows: int, cols: int) -> HardwareConfig:
    edges = []
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            if c + 1 < cols:
                edges.append((q, q + 1))
            if r + 1 < rows:
                edges.append((q, q + cols))
    return make_config(rows * cols, edges)


@pytest.fixture(scope="session")
def s17() -> HardwareConfig:
    return builtin_surface17()


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion; all are repeated in the summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
