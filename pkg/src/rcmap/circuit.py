"""Circuit IR, the textual input format, and scheduled (bundled) output."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable, Mapping

from .config import HardwareConfig, builtin_surface17

if TYPE_CHECKING:
    from .placement import VPMap
    from .scheduler import Schedule

INPUT = "input"
MOVEMENT = "movement_inserted"
DECOMPOSED = "decomposition_product"

NAME_ALIASES = {
    "rx180": "x",
    "ry180": "y",
    "cx": "cnot",
    "tdg": "tdag",
    "sdg": "sdag",
}


class CircuitError(ValueError):
    pass


class CircuitSyntaxError(CircuitError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Gate:
    id: int
    name: str
    operands: tuple[int, ...]
    origin: str = INPUT

    def __post_init__(self) -> None:
        if len(set(self.operands)) != len(self.operands):
            raise CircuitError(f"gate {self.name}{self.operands}: operands must be distinct")

    @property
    def is_two_qubit(self) -> bool:
        return len(self.operands) == 2

    def __str__(self) -> str:
        return f"{self.name} " + ", ".join(f"q{q}" for q in self.operands)


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    gates: tuple[Gate, ...] = ()
    name: str = "circuit"

    def __post_init__(self) -> None:
        for g in self.gates:
            for q in g.operands:
                if not 0 <= q < self.qubit_count:
                    raise CircuitError(f"gate {g}: operand q{q} out of range (qubits {self.qubit_count})")

    def __len__(self) -> int:
        return len(self.gates)

    def gate_by_id(self) -> dict[int, Gate]:
        return {g.id: g for g in self.gates}

    def with_gates(self, gates: Iterable[Gate], qubit_count: int | None = None) -> "Circuit":
        return replace(self, gates=tuple(gates),
                       qubit_count=self.qubit_count if qubit_count is None else qubit_count)

    def renumbered(self) -> "Circuit":
        """Same gates with ids 0..n-1 in list order."""
        return self.with_gates(replace(g, id=i) for i, g in enumerate(self.gates))


def build_circuit(qubit_count: int, ops: Iterable[tuple], name: str = "circuit") -> Circuit:
    """Convenience constructor: ``build_circuit(2, [("x", 0), ("cnot", 0, 1)])``."""
    gates = [Gate(i, op[0], tuple(op[1:])) for i, op in enumerate(ops)]
    return Circuit(qubit_count, tuple(gates), name)


# -- parser ------------------------------------------------------------------

_QUBIT = re.compile(r"^q(\d+)$", re.IGNORECASE)
_HEADER = re.compile(r"^qubits\s+(\d+)$", re.IGNORECASE)


def parse_circuit(text: str, config: HardwareConfig | None = None, name: str = "circuit") -> Circuit:
    config = config or builtin_surface17()
    qubit_count: int | None = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if qubit_count is None:
            m = _HEADER.match(line)
            if not m:
                raise CircuitSyntaxError(lineno, "expected 'qubits N' header")
            qubit_count = int(m.group(1))
            continue
        head, _, rest = line.partition(" ")
        gate_name = NAME_ALIASES.get(head.lower(), head.lower())
        if not config.known_gate(gate_name):
            raise CircuitSyntaxError(lineno, f"unknown gate {head!r}")
        operands = []
        for tok in (t.strip() for t in rest.split(",")) if rest.strip() else ():
            m = _QUBIT.match(tok)
            if not m:
                raise CircuitSyntaxError(lineno, f"bad operand {tok!r}")
            q = int(m.group(1))
            if q >= qubit_count:
                raise CircuitSyntaxError(lineno, f"operand q{q} out of range (qubits {qubit_count})")
            operands.append(q)
        arity = config.arity(gate_name)
        if len(operands) != arity:
            raise CircuitSyntaxError(lineno, f"{gate_name} takes {arity} operand(s), got {len(operands)}")
        if len(set(operands)) != len(operands):
            raise CircuitSyntaxError(lineno, "operands must be distinct")
        gates.append(Gate(len(gates), gate_name, tuple(operands)))
    if qubit_count is None:
        raise CircuitSyntaxError(1, "empty document; expected 'qubits N' header")
    return Circuit(qubit_count, tuple(gates), name)


def emit_unscheduled(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.qubit_count}"]
    lines += [str(g) for g in circuit.gates]
    return "\n".join(lines) + "\n"


# -- bundled output ------------------------------------------------------------

@dataclass
class BundledOutput:
    bundles: list[list[Gate]]  # index = cycle
    latency: int
    vpmap: Mapping[int, int] = field(default_factory=dict)  # virtual -> physical

    def render(self) -> str:
        lines = []
        for t, bundle in enumerate(self.bundles):
            if bundle:
                lines.append(f"cycle {t}: {{ " + " | ".join(str(g) for g in bundle) + " }")
            else:
                lines.append(f"cycle {t}: -")
        lines.append(f"# latency {self.latency} cycles")
        lines += [f"# vpmap v{v} -> p{p}" for v, p in sorted(self.vpmap.items())]
        return "\n".join(lines) + "\n"


def bundle(circuit: Circuit, schedule: "Schedule", vpmap: "VPMap | Mapping[int, int] | None" = None) -> BundledOutput:
    forward = getattr(vpmap, "forward", vpmap) or {}
    bundles: list[list[Gate]] = [[] for _ in range(schedule.latency)]
    for g in circuit.gates:
        if g.id not in schedule.start:
            raise CircuitError(f"schedule is missing gate {g.id} ({g})")
        bundles[schedule.start[g.id]].append(g)
    for b in bundles:
        b.sort(key=lambda g: g.id)
    return BundledOutput(bundles, schedule.latency, dict(forward))


def emit_bundled(circuit: Circuit, schedule: "Schedule", vpmap: "VPMap | Mapping[int, int] | None" = None) -> str:
    return bundle(circuit, schedule, vpmap).render()
