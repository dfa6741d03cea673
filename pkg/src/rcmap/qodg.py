"""Weighted operation dependency graph with commutation-aware edges."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .circuit import Circuit, Gate
from .config import HardwareConfig
from .decompose import gate_duration

SOURCE = "SOURCE"
SINK = "SINK"

Z_TYPE_1Q = frozenset({"z", "s", "sdag", "t", "tdag"})


class GraphCycleError(ValueError):
    pass


def commute_type(gate: Gate, qubit: int) -> str | None:
    """Basis in which ``gate`` acts diagonally on ``qubit`` ("z"/"x"), or None."""
    if gate.name == "cz":
        return "z"
    if gate.name == "cnot":
        return "z" if gate.operands[0] == qubit else "x"
    if gate.name in Z_TYPE_1Q:
        return "z"
    return None


def gates_commute(a: Gate, b: Gate) -> bool:
    """True when the dependency graph leaves ``a`` and ``b`` unordered."""
    shared = set(a.operands) & set(b.operands)
    if not shared:
        return True
    if len(a.operands) == 1 and len(b.operands) == 1:
        return False
    for q in shared:
        ta = commute_type(a, q)
        if ta is None or ta != commute_type(b, q):
            return False
    return True


@dataclass
class QODG:
    gates: list[Gate]
    preds: list[list[int]]  # by position in ``gates``
    succs: list[list[int]]
    durations: list[int]
    criticality: list[int] = field(default_factory=list)
    resources: list[tuple[int, ...]] | None = None

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def ids(self) -> list[int]:
        return [g.id for g in self.gates]

    def edges(self) -> list[tuple[Hashable, Hashable, int]]:
        """All edges as (u, v, weight) with gate ids and the SOURCE/SINK markers."""
        out: list[tuple[Hashable, Hashable, int]] = []
        for i, g in enumerate(self.gates):
            if not self.preds[i]:
                out.append((SOURCE, g.id, 0))
            for j in self.succs[i]:
                out.append((g.id, self.gates[j].id, self.durations[i]))
            if not self.succs[i]:
                out.append((g.id, SINK, self.durations[i]))
        return out

    def critical_path(self) -> int:
        return max(self.criticality, default=0)

    def criticality_of(self, node: Hashable) -> int:
        if node == SINK:
            return 0
        if node == SOURCE:
            return self.critical_path()
        return self.criticality[self.position(node)]

    def position(self, gate_id: int) -> int:
        if not hasattr(self, "_pos"):
            self._pos = {g.id: i for i, g in enumerate(self.gates)}
        return self._pos[gate_id]

    def to_dot(self) -> str:
        lines = ["digraph qodg {", f'  "{SOURCE}";', f'  "{SINK}";']
        for i, g in enumerate(self.gates):
            lines.append(f'  {g.id} [label="{g} ({self.criticality[i]})"];')
        for u, v, w in self.edges():
            lines.append(f'  "{u}" -> "{v}" [label="{w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class QODGBuilder:
    """Incremental construction; ``fork`` gives a cheap copy that can be extended independently."""

    def __init__(self, config: HardwareConfig):
        self.config = config
        self.gates: list[Gate] = []
        self.preds: list[list[int]] = []
        self.succs: list[list[int]] = []
        self.durations: list[int] = []
        self._table: dict[str, int] = {}
        # per qubit: [previous group, current group, current group's type, last 1q member]
        self._state: dict[int, list] = {}
        self._shared = 0  # succs[:_shared] may be aliased by another builder

    def add(self, g: Gate) -> None:
        i = len(self.gates)
        d = self._table.get(g.name)
        if d is None:
            d = self._table[g.name] = gate_duration(self.config, g.name)
        deps: set[int] = set()
        single = len(g.operands) == 1
        state = self._state
        for q in g.operands:
            st = state.get(q)
            if st is None:
                st = state[q] = [[], [], None, None]
            kind = commute_type(g, q)
            if kind is not None and kind == st[2]:
                deps.update(st[0])
                if single and st[3] is not None:
                    deps.add(st[3])
                st[1].append(i)
            else:
                deps.update(st[1])
                st[0], st[1], st[2], st[3] = st[1], [i], kind, None
            if single:
                st[3] = i
        preds = sorted(deps)
        succs = self.succs
        for p in preds:
            if p < self._shared:
                succs[p] = succs[p] + [i]  # copy on write
            else:
                succs[p].append(i)
        self.gates.append(g)
        self.preds.append(preds)
        self.succs.append([])
        self.durations.append(d)

    def extend(self, gates: Iterable[Gate]) -> "QODGBuilder":
        for g in gates:
            self.add(g)
        return self

    def fork(self) -> "QODGBuilder":
        other = QODGBuilder.__new__(QODGBuilder)
        other.config = self.config
        other.gates = list(self.gates)
        other.preds = list(self.preds)
        other.succs = list(self.succs)
        other.durations = list(self.durations)
        other._table = self._table
        # group lists are appended to in place, so they are copied
        other._state = {q: [st[0], list(st[1]), st[2], st[3]] for q, st in self._state.items()}
        other._shared = len(self.gates)
        self._shared = len(self.gates)
        return other

    def build(self) -> QODG:
        graph = QODG(self.gates, self.preds, self.succs, self.durations)
        graph.criticality = _criticality_in_order(self.succs, self.durations)
        return graph


def build_qodg(circuit: Circuit | Iterable[Gate], config: HardwareConfig) -> QODG:
    gates = circuit.gates if isinstance(circuit, Circuit) else circuit
    return QODGBuilder(config).extend(gates).build()


def _criticality_in_order(succs: list[list[int]], durations: list[int]) -> list[int]:
    # edges always point forward in program order, so a reverse sweep is topological
    crit = [0] * len(durations)
    for i in range(len(durations) - 1, -1, -1):
        best = 0
        for s in succs[i]:
            if crit[s] > best:
                best = crit[s]
        crit[i] = durations[i] + best
    return crit


def compute_criticality(
    succs: Mapping[Hashable, Iterable[Hashable]], durations: Mapping[Hashable, int]
) -> dict[Hashable, int]:
    """Longest weighted path from each node to the sink, for an arbitrary DAG.

    ``succs`` lists successors of every node; nodes without successors feed
    the sink. One reverse-topological pass; raises GraphCycleError on cycles.
    """
    nodes = set(durations) | set(succs)
    for vs in succs.values():
        nodes.update(vs)
    outdeg = {v: 0 for v in nodes}
    rev: dict[Hashable, list[Hashable]] = {v: [] for v in nodes}
    for u, vs in succs.items():
        for v in vs:
            outdeg[u] += 1
            rev[v].append(u)
    crit: dict[Hashable, int] = {}
    best: dict[Hashable, int] = {v: 0 for v in nodes}
    queue = deque(v for v in nodes if outdeg[v] == 0)
    while queue:
        v = queue.popleft()
        crit[v] = durations.get(v, 0) + best[v]
        for u in rev[v]:
            best[u] = max(best[u], crit[v])
            outdeg[u] -= 1
            if outdeg[u] == 0:
                queue.append(u)
    if len(crit) != len(nodes):
        raise GraphCycleError("dependency graph contains a cycle")
    return crit


def qodg_criticality(graph: QODG) -> dict[Hashable, int]:
    """Criticality keyed by gate id, plus SOURCE and SINK."""
    succs: dict[Hashable, list[Hashable]] = {SOURCE: [], SINK: []}
    durations: dict[Hashable, int] = {SOURCE: 0, SINK: 0}
    for u, v, _ in graph.edges():
        succs.setdefault(u, []).append(v)
    for i, g in enumerate(graph.gates):
        durations[g.id] = graph.durations[i]
    return compute_criticality(succs, durations)
