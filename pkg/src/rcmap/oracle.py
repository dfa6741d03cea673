"""Dense statevector simulation used as ground truth for equivalence checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .circuit import Circuit, Gate
from .config import HardwareConfig, builtin_surface17

MAX_STATEVECTOR_QUBITS = 12
MAX_UNITARY_QUBITS = 6

_S2 = 1 / np.sqrt(2)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CNOT_REV = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)

# Reference matrices for gates that are not primitives. Two-qubit matrices
# use basis |op0 op1>, op0 being the more significant bit.
ALIAS_MATRICES: dict[str, np.ndarray] = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "z": np.diag([1, -1]).astype(complex),
    "s": np.diag([1, 1j]),
    "sdag": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdag": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "cnot": _CNOT,
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    # CNOT(a->b) then CNOT(b->a): |psi>|0> -> |0>|psi>
    "move": _CNOT_REV @ _CNOT,
}


class OracleError(ValueError):
    pass


def rotation_matrix(axis: str, degrees: float) -> np.ndarray:
    half = np.deg2rad(degrees) / 2
    c, s = np.cos(half), np.sin(half)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "z":
        return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]], dtype=complex)
    raise OracleError(f"unknown rotation axis {axis!r}")


def gate_matrix(name: str, config: HardwareConfig | None = None) -> np.ndarray:
    config = config or builtin_surface17()
    spec = config.gates.get(name)
    if spec is not None:
        if spec.kind == "measurement":
            raise OracleError("measurement is not unitary")
        if isinstance(spec.unitary, tuple):
            return rotation_matrix(*spec.unitary)
        if spec.unitary == "cz":
            return np.diag([1, 1, 1, -1]).astype(complex)
        raise OracleError(f"gate {name!r} has no unitary descriptor")
    if name in ALIAS_MATRICES:
        return ALIAS_MATRICES[name]
    raise OracleError(f"no matrix for gate {name!r}")


def apply_gate(state: np.ndarray, matrix: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    k = len(qubits)
    psi = state.reshape((2,) * n)
    op = matrix.reshape((2,) * (2 * k))
    psi = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    # tensordot puts the gate's output axes first; move them back into place
    return np.moveaxis(psi, list(range(k)), list(qubits)).reshape(-1)


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(2 ** n, dtype=complex)
    state[0] = 1
    return state


def simulate(circuit: Circuit | Iterable[Gate], n: int | None = None,
             config: HardwareConfig | None = None, state: np.ndarray | None = None) -> np.ndarray:
    gates = list(circuit.gates if isinstance(circuit, Circuit) else circuit)
    if n is None:
        if not isinstance(circuit, Circuit):
            raise OracleError("qubit count required for a bare gate list")
        n = circuit.qubit_count
    if n > MAX_STATEVECTOR_QUBITS:
        raise OracleError(f"{n} qubits exceeds the statevector limit of {MAX_STATEVECTOR_QUBITS}")
    config = config or builtin_surface17()
    psi = zero_state(n) if state is None else np.asarray(state, dtype=complex).copy()
    cache: dict[str, np.ndarray] = {}
    for g in gates:
        if g.name == "measure":
            raise OracleError("cannot simulate a circuit containing measurement")
        if g.name not in cache:
            cache[g.name] = gate_matrix(g.name, config)
        psi = apply_gate(psi, cache[g.name], g.operands, n)
    return psi


def unitary(circuit: Circuit | Iterable[Gate], n: int | None = None,
            config: HardwareConfig | None = None) -> np.ndarray:
    """Full matrix, one basis column at a time."""
    if n is None:
        n = circuit.qubit_count  # type: ignore[union-attr]
    if n > MAX_UNITARY_QUBITS:
        raise OracleError(f"{n} qubits exceeds the full-unitary limit of {MAX_UNITARY_QUBITS}")
    gates = list(circuit.gates if isinstance(circuit, Circuit) else circuit)
    dim = 2 ** n
    cols = []
    for j in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[j] = 1
        cols.append(simulate(gates, n, config, basis))
    return np.stack(cols, axis=1)


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - |tr(U^dag V)| / d: zero iff the matrices agree up to global phase."""
    return float(1 - abs(np.trace(u.conj().T @ v)) / u.shape[0])


def random_qubit_state(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def product_state(singles: Mapping[int, np.ndarray], n: int) -> np.ndarray:
    """Tensor product with ``singles[q]`` on qubit q and |0> elsewhere."""
    psi = np.array([1], dtype=complex)
    for q in range(n):
        psi = np.kron(psi, singles.get(q, np.array([1, 0], dtype=complex)))
    return psi


@dataclass
class Equivalence:
    ok: bool
    fidelity: float

    def __bool__(self) -> bool:
        return self.ok


def equivalent(
    original: Circuit,
    mapped: Circuit | Iterable[Gate],
    initial: Mapping[int, int],
    final: Mapping[int, int],
    config: HardwareConfig | None = None,
    trials: int = 20,
    seed: int = 0,
    tol: float = 1e-9,
) -> Equivalence:
    """Check that ``mapped`` (on physical qubits) implements ``original``.

    Each virtual qubit v starts on physical ``initial[v]`` and must end on
    ``final[v]``; every other physical qubit starts and ends in |0>. The
    comparison runs on random product inputs and reports the worst overlap.
    """
    initial = getattr(initial, "forward", initial)
    final = getattr(final, "forward", final)
    if original.qubit_count > MAX_UNITARY_QUBITS:
        raise OracleError(f"original circuit has more than {MAX_UNITARY_QUBITS} qubits")
    gates = list(mapped.gates if isinstance(mapped, Circuit) else mapped)
    virtual = range(original.qubit_count)
    used = sorted({q for g in gates for q in g.operands}
                  | {initial[v] for v in virtual} | {final[v] for v in virtual})
    local = {p: i for i, p in enumerate(used)}
    m = len(used)
    if m > MAX_STATEVECTOR_QUBITS:
        raise OracleError(f"mapped circuit touches {m} qubits (limit {MAX_STATEVECTOR_QUBITS})")
    relabeled = [Gate(g.id, g.name, tuple(local[q] for q in g.operands), g.origin) for g in gates]

    rng = np.random.default_rng(seed)
    worst = 1.0
    for _ in range(trials):
        singles = {v: random_qubit_state(rng) for v in virtual}
        expected_virtual = simulate(original, original.qubit_count, config,
                                    product_state(singles, original.qubit_count))
        start = product_state({local[initial[v]]: s for v, s in singles.items()}, m)
        actual = simulate(relabeled, m, config, start)
        expected = _embed(expected_virtual, [local[final[v]] for v in virtual], m)
        worst = min(worst, float(abs(np.vdot(expected, actual))))
    return Equivalence(worst > 1 - tol, worst)


def _embed(state: np.ndarray, positions: list[int], m: int) -> np.ndarray:
    """Place a k-qubit state onto ``positions`` of an m-qubit register, |0> elsewhere."""
    k = len(positions)
    full = np.zeros((2,) * m, dtype=complex)
    psi = state.reshape((2,) * k) if k else state.reshape(())
    # sweep the virtual axes into the chosen physical axes, ancillas stay at 0
    sl = tuple(slice(None) if q in positions else 0 for q in range(m))
    order = sorted(range(k), key=lambda v: positions[v])
    full[sl] = np.transpose(psi, order) if k else psi
    return full.reshape(-1)
