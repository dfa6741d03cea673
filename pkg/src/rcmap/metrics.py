"""Circuit statistics, overhead ratios and CSV/JSON experiment reports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Iterable

from .circuit import Circuit
from .config import HardwareConfig
from .decompose import gate_duration
from .scheduler import Schedule

REPORT_COLUMNS = ("name", "strategy", "seed", "latency", "gates", "czs", "swaps", "moves",
                  "time_s", "latency_overhead", "gate_overhead")


class OverheadError(ZeroDivisionError):
    pass


@dataclass
class CircuitStats:
    qubits: int = 0
    gates: int = 0
    two_qubit_gates: int = 0
    depth: int = 0
    latency: int = 0
    swaps: int = 0
    moves: int = 0
    seconds: float = 0.0


def circuit_depth(circuit: Circuit) -> int:
    """Unit-time ASAP length along per-qubit dependency chains."""
    level: dict[int, int] = {}
    depth = 0
    for g in circuit.gates:
        t = max((level.get(q, 0) for q in g.operands), default=0) + 1
        for q in g.operands:
            level[q] = t
        depth = max(depth, t)
    return depth


def unconstrained_latency(circuit: Circuit, config: HardwareConfig) -> int:
    """Cycles along per-qubit chains with real durations, ignoring topology and control limits."""
    ready: dict[int, int] = {}
    latency = 0
    for g in circuit.gates:
        end = max((ready.get(q, 0) for q in g.operands), default=0) + gate_duration(config, g.name)
        for q in g.operands:
            ready[q] = end
        latency = max(latency, end)
    return latency


def stats(circuit: Circuit, schedule: Schedule | None = None, swaps: int = 0, moves: int = 0,
          seconds: float = 0.0) -> CircuitStats:
    used = {q for g in circuit.gates for q in g.operands}
    return CircuitStats(
        qubits=len(used),
        gates=len(circuit.gates),
        two_qubit_gates=sum(1 for g in circuit.gates if len(g.operands) == 2),
        depth=circuit_depth(circuit),
        latency=schedule.latency if schedule is not None else 0,
        swaps=swaps,
        moves=moves,
        seconds=seconds,
    )


def overhead(before: float, after: float) -> float:
    """Relative growth (after - before) / before."""
    if before == 0:
        raise OverheadError("overhead is undefined for a zero baseline")
    return (after - before) / before


@dataclass
class ReportRow:
    name: str
    strategy: str
    seed: int
    latency: int
    gates: int
    czs: int
    swaps: int
    moves: int
    time_s: float
    latency_overhead: float | None
    gate_overhead: float | None

    @classmethod
    def build(cls, name: str, strategy: str, seed: int, after: CircuitStats,
              before: CircuitStats | None = None, timing: bool = True) -> "ReportRow":
        lat_oh = gate_oh = None
        if before is not None:
            lat_oh = overhead(before.latency, after.latency) if before.latency else None
            gate_oh = overhead(before.gates, after.gates) if before.gates else None
        return cls(name, strategy, seed, after.latency, after.gates, after.two_qubit_gates,
                   after.swaps, after.moves, round(after.seconds, 6) if timing else 0.0, lat_oh, gate_oh)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_cell(d[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def report_json(rows: Iterable[ReportRow]) -> str:
    return json.dumps([{c: asdict(r)[c] for c in REPORT_COLUMNS} for r in rows], indent=1) + "\n"


def report(rows: Iterable[ReportRow]) -> tuple[str, str]:
    rows = list(rows)
    return report_csv(rows), report_json(rows)


def read_csv_report(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
