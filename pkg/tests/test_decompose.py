import numpy as np
import pytest
from hypothesis import given, strategies as st

from rcmap.circuit import DECOMPOSED, INPUT, MOVEMENT, Circuit, Gate, build_circuit
from rcmap.config import builtin_surface17
from rcmap.decompose import DecompositionError, decompose, expand, gate_duration, optimize_1q
from rcmap.oracle import phase_distance, unitary

S2 = 1 / np.sqrt(2)
I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]])
P0, P1 = np.diag([1, 0]), np.diag([0, 1])
# textbook matrices, operand 0 is the most significant bit
REFERENCE = {
    "h": np.array([[1, 1], [1, -1]]) * S2,
    "z": np.diag([1, -1]),
    "s": np.diag([1, 1j]),
    "sdag": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdag": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "cnot": np.kron(P0, I2) + np.kron(P1, X),
    "swap": np.eye(4)[[0, 2, 1, 3]],
}
REFERENCE["move"] = (np.kron(I2, P0) + np.kron(X, P1)) @ REFERENCE["cnot"]


@pytest.mark.parametrize("name", sorted(REFERENCE))
def test_rule_matches_reference_matrix(s17, name):
    arity = s17.arity(name)
    prims = [Gate(i, n, ops) for i, (n, ops) in enumerate(expand(s17, name, tuple(range(arity))))]
    assert all(s17.is_primitive(g.name) for g in prims)
    assert phase_distance(REFERENCE[name], unitary(prims, arity, s17)) < 1e-12


def test_move_transfers_into_clean_qubit(s17):
    prims = [Gate(i, n, ops) for i, (n, ops) in enumerate(expand(s17, "move", (0, 1)))]
    u = unitary(prims, 2, s17)
    psi = np.array([0.6, 0.8j])
    out = u @ np.kron(psi, [1, 0])
    assert abs(abs(np.vdot(np.kron([1, 0], psi), out)) - 1) < 1e-12


@pytest.mark.parametrize("name, total, czs", [("cnot", 3, 1), ("swap", 9, 3), ("move", 6, 2)])
def test_pinned_counts(s17, name, total, czs):
    prims = expand(s17, name, (0, 1))
    assert len(prims) == total
    assert sum(n == "cz" for n, _ in prims) == czs


@pytest.mark.parametrize("name, cycles", [("cnot", 4), ("swap", 10), ("move", 7), ("h", 2), ("t", 3), ("x", 1)])
def test_alias_durations(s17, name, cycles):
    assert gate_duration(s17, name) == cycles


def test_unknown_gate(s17):
    with pytest.raises(DecompositionError):
        expand(s17, "ccx", (0, 1, 2))
    with pytest.raises(DecompositionError):
        gate_duration(s17, "ccx")


def test_decompose_origins_and_ids(s17):
    c = Circuit(2, (Gate(0, "x", (0,)), Gate(1, "cnot", (0, 1)), Gate(2, "swap", (1, 0), MOVEMENT)))
    out = decompose(c, s17)
    assert [g.id for g in out.gates] == list(range(len(out.gates)))
    assert out.gates[0].origin == INPUT
    assert {g.origin for g in out.gates[1:4]} == {DECOMPOSED}
    assert {g.origin for g in out.gates[4:]} == {MOVEMENT}
    assert len(out.gates) == 1 + 3 + 9


def test_partial_decompose_keeps_two_qubit_aliases(s17):
    c = build_circuit(2, [("h", 0), ("cnot", 0, 1)])
    out = decompose(c, s17, only={"h"})
    assert [g.name for g in out.gates] == ["ry90", "x", "cnot"]


@pytest.mark.parametrize(
    "ops, expected",
    [
        ([("x", 0), ("x", 0)], []),
        ([("rx90", 0), ("rx90", 0)], ["x"]),
        ([("rx45", 0), ("rx45", 0), ("ry90", 0)], ["rx90", "ry90"]),
        ([("rx45", 0), ("rx90", 0)], ["rx45", "rx90"]),  # 135 degrees is not a primitive
        ([("x", 0), ("y", 1), ("rxm180", 0)], ["y"]),
        ([("rx90", 0), ("cz", 0, 1), ("rxm90", 0)], ["rx90", "cz", "rxm90"]),
    ],
)
def test_optimize_examples(s17, ops, expected):
    out = optimize_1q(build_circuit(2, ops), s17)
    assert [g.name for g in out.gates] == expected


_ROT = [n for n, g in builtin_surface17().gates.items() if g.is_rotation]


@given(st.lists(st.tuples(st.sampled_from(_ROT + ["cz"]), st.integers(0, 1)), max_size=25))
def test_optimize_preserves_unitary(ops):
    s17 = builtin_surface17()
    c = build_circuit(2, [(n, q, 1 - q) if n == "cz" else (n, q) for n, q in ops])
    out = optimize_1q(c, s17)
    assert len(out.gates) <= len(c.gates)
    assert phase_distance(unitary(c, 2, s17), unitary(out, 2, s17)) < 1e-9
    assert optimize_1q(out, s17) == out
