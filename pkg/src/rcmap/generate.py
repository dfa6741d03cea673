"""Seeded random circuits for property tests and benchmark suites."""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate

ONE_QUBIT_GATES = ("x", "y", "h", "z", "s", "sdag", "t", "tdag", "rx90", "rym90")
TWO_QUBIT_GATES = ("cnot", "cnot", "cz")


def random_circuit(
    qubits: int,
    gates: int,
    seed: int | np.random.Generator = 0,
    two_qubit_fraction: float = 0.5,
    measure: bool = False,
    name: str | None = None,
) -> Circuit:
    """Uniformly random gates over ``qubits`` virtual qubits.

    With ``measure`` every qubit gets a trailing measurement (not counted
    in ``gates``).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out: list[Gate] = []
    for i in range(gates):
        if qubits >= 2 and rng.random() < two_qubit_fraction:
            a, b = rng.choice(qubits, size=2, replace=False)
            out.append(Gate(i, str(rng.choice(TWO_QUBIT_GATES)), (int(a), int(b))))
        else:
            out.append(Gate(i, str(rng.choice(ONE_QUBIT_GATES)), (int(rng.integers(qubits)),)))
    if measure:
        out += [Gate(len(out), "measure", (q,)) for q in range(qubits)]
    return Circuit(qubits, tuple(out), name or f"rand_q{qubits}_g{gates}")


# Surface-17 corners and edge midpoints, far from each other
SPREAD_SITES = (0, 16, 4, 12, 1, 15)


def clean_ancilla_suite(size: int = 24, sites: tuple[int, ...] = SPREAD_SITES):
    """(circuit, placement) pairs where few virtual qubits sit far apart.

    Every routing path then runs through unoccupied, clean physical qubits,
    which is where a MOVE can replace a SWAP.
    """
    from .placement import VPMap  # local: placement imports the scheduler stack

    for i in range(size):
        k = 2 + i % (len(sites) - 2)
        c = random_circuit(k, 10 + 2 * i, 100 + i, two_qubit_fraction=0.6, name=f"sparse{i}")
        yield c, VPMap.from_forward({v: sites[v] for v in range(k)}, 17)
