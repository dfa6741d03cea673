"""Resource-constrained critical-path list scheduling (ASAP and ALAP).

Classical-control restrictions are modelled as resources. Every gate
reserves a set of resources for ``[start, start + duration)``; two
reservations on one resource may overlap only when the resource is an AWG
or feedline and both reservations are the same operation over the
identical interval.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .circuit import Circuit, Gate
from .config import HardwareConfig
from .decompose import expand, gate_duration
from .qodg import QODG

RESOURCE_KINDS = ("awg", "feedline", "qubit", "edge")
SHAREABLE_KINDS = frozenset({"awg", "feedline"})


class SchedulingError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ResourceId:
    kind: str
    index: int

    def __str__(self) -> str:
        return f"{self.kind}[{self.index}]"


@dataclass(frozen=True)
class Reservation:
    start: int
    end: int
    op_name: str
    gate_id: int = -1

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise SchedulingError(f"empty reservation [{self.start}, {self.end})")

    def overlaps(self, other: "Reservation") -> bool:
        return self.start < other.end and other.start < self.end


def share_compatible(kind: str, a: Reservation, b: Reservation) -> bool:
    return (kind in SHAREABLE_KINDS and a.op_name == b.op_name
            and a.start == b.start and a.end == b.end)


@dataclass
class Schedule:
    start: dict[int, int]
    latency: int

    @classmethod
    def from_starts(cls, start: dict[int, int], durations: dict[int, int]) -> "Schedule":
        latency = max((start[g] + durations[g] for g in start), default=0)
        return cls(dict(start), latency)


# -- resources -----------------------------------------------------------------

def _primitive_claims(config: HardwareConfig, name: str,
                      operands: tuple[int, ...]) -> tuple[set[ResourceId], set[ResourceId]]:
    """(held, watched): held resources are reserved, watched ones must merely be idle."""
    spec = config.gates[name]
    if spec.kind == "single_qubit_rotation":
        (q,) = operands
        return {ResourceId("awg", config.awg_of[q]), ResourceId("qubit", q)}, set()
    if spec.kind == "measurement":
        (q,) = operands
        return {ResourceId("feedline", config.feedline_of[q]), ResourceId("qubit", q)}, set()
    a, b = operands
    edge = (a, b)
    if edge not in config.edge_set:
        raise SchedulingError(f"{name} q{a}, q{b}: qubits are not connected")
    own = config.coupler_index[edge]
    held = {ResourceId("edge", own), ResourceId("qubit", a), ResourceId("qubit", b)}
    held.update(ResourceId("qubit", d) for d in config.cz_detuned_qubits[edge])
    # conflicting couplers are only watched: reserving them would make two CZs
    # that share a conflict partner block each other
    watched = {ResourceId("edge", config.coupler_index[e]) for e in config.cz_edge_conflicts[edge]}
    watched.discard(ResourceId("edge", own))
    return held, watched


@lru_cache(maxsize=200_000)
def _claims(config: HardwareConfig, name: str,
            operands: tuple[int, ...]) -> tuple[frozenset[ResourceId], frozenset[ResourceId]]:
    if config.is_primitive(name):
        held, watched = _primitive_claims(config, name, operands)
        return frozenset(held), frozenset(watched - held)
    # composite gates conservatively claim everything their expansion touches
    held, watched = set(), set()
    for prim, ops in expand(config, name, operands):
        h, w = _primitive_claims(config, prim, ops)
        held |= h
        watched |= w
    return frozenset(held), frozenset(watched - held)


def resources_for(gate: Gate, config: HardwareConfig) -> frozenset[ResourceId]:
    """Resources a gate holds for its whole duration (operands are physical)."""
    return _claims(config, gate.name, gate.operands)[0]


def watched_for(gate: Gate, config: HardwareConfig) -> frozenset[ResourceId]:
    """Couplers that must be idle while the gate runs, without being held by it."""
    return _claims(config, gate.name, gate.operands)[1]


@lru_cache(maxsize=None)
def _resource_layout(config: HardwareConfig) -> tuple[dict[str, int], tuple[bool, ...]]:
    sizes = {"awg": len(config.awgs), "feedline": len(config.feedlines),
             "qubit": config.qubit_count, "edge": len(config.undirected_edges)}
    offsets, shareable, base = {}, [], 0
    for kind in RESOURCE_KINDS:
        offsets[kind] = base
        base += sizes[kind]
        shareable += [kind in SHAREABLE_KINDS] * sizes[kind]
    return offsets, tuple(shareable)


Codes = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


@lru_cache(maxsize=200_000)
def _resource_codes(config: HardwareConfig, name: str, operands: tuple[int, ...]) -> Codes:
    """Integer form used by the list scheduler: (held slots, own couplers, conflicting couplers).

    Watched couplers are handled through a per-coupler "blocked until" cycle:
    reserving a coupler raises it on every conflicting coupler, and a CZ may
    start only once its own couplers are unblocked.
    """
    offsets, _ = _resource_layout(config)
    held, _ = _claims(config, name, operands)
    own = sorted(r.index for r in held if r.kind == "edge")
    notify: set[int] = set()
    by_index = {config.coupler_index[e]: e for e in config.edges}
    for c in own:
        notify.update(config.coupler_index[e] for e in config.cz_edge_conflicts[by_index[c]])
    return (tuple(sorted(offsets[r.kind] + r.index for r in held)), tuple(own), tuple(sorted(notify)))


def resource_codes(gates: Iterable[Gate], config: HardwareConfig) -> list[Codes]:
    lookup: dict[tuple[str, tuple[int, ...]], Codes] = {}
    out = []
    for g in gates:
        key = (g.name, g.operands)
        c = lookup.get(key)
        if c is None:
            c = lookup[key] = _resource_codes(config, g.name, g.operands)
        out.append(c)
    return out


class MachineState:
    """Reservations per resource; the reference model used by tests and tools."""

    def __init__(self) -> None:
        self.reservations: dict[ResourceId, list[Reservation]] = {}

    def reserve(self, resources: Iterable[ResourceId], reservation: Reservation) -> None:
        for r in resources:
            self.reservations.setdefault(r, []).append(reservation)

    def is_free(self, resources: Iterable[ResourceId], op_name: str, t: int, duration: int,
                watched: Iterable[ResourceId] = ()) -> bool:
        probe = Reservation(t, t + duration, op_name)
        for r in resources:
            for existing in self.reservations.get(r, ()):
                if existing.overlaps(probe) and not share_compatible(r.kind, existing, probe):
                    return False
        for r in watched:
            if any(existing.overlaps(probe) for existing in self.reservations.get(r, ())):
                return False
        return True


def is_resource_free(state: MachineState, gate: Gate, t: int, config: HardwareConfig) -> bool:
    return state.is_free(resources_for(gate, config), gate.name, t, gate_duration(config, gate.name),
                         watched_for(gate, config))


# -- list scheduler --------------------------------------------------------------

def _list_schedule(
    gates: list[Gate],
    preds: list[list[int]],
    succs: list[list[int]],
    durations: list[int],
    priority: list[tuple[int, int]],
    config: HardwareConfig,
    codes: list[Codes] | None = None,
) -> list[int]:
    """Forward list scheduling; returns the start cycle of every gate.

    ``priority`` orders gates (smaller first) among those resource-free at
    the current cycle. Between scheduling decisions the cycle jumps straight
    to the next reservation end, which is where freeness can change.
    """
    n = len(gates)
    _, shareable = _resource_layout(config)
    if codes is None:
        codes = resource_codes(gates, config)
    names = [g.name for g in gates]
    R = len(shareable)
    last_start = [0] * R
    last_end = [0] * R
    last_name: list[str | None] = [None] * R
    blocked = [0] * len(config.undirected_edges)

    waiting = [len(p) for p in preds]
    ready = [0] * n
    start = [-1] * n
    avail = sorted(priority[i] + (i,) for i in range(n) if waiting[i] == 0)
    ends: list[int] = []
    t = 0
    while avail:
        keep = []
        fresh = []
        for key in avail:
            i = key[-1]
            if ready[i] > t:
                keep.append(key)
                continue
            d = durations[i]
            end = t + d
            name = names[i]
            ok = True
            held, own, notify = codes[i]
            for c in own:
                if blocked[c] > t:
                    ok = False
                    break
            if ok:
                for r in held:
                    if last_end[r] > t and not (
                        shareable[r] and last_start[r] == t and last_end[r] == end and last_name[r] == name
                    ):
                        ok = False
                        break
            if not ok:
                keep.append(key)
                continue
            start[i] = t
            for r in held:
                last_start[r] = t
                last_end[r] = end
                last_name[r] = name
            for c in notify:
                if blocked[c] < end:
                    blocked[c] = end
            heapq.heappush(ends, end)
            for s in succs[i]:
                waiting[s] -= 1
                if ready[s] < end:
                    ready[s] = end
                if waiting[s] == 0:
                    fresh.append(priority[s] + (s,))
        if fresh:
            keep.extend(fresh)
            keep.sort()
        avail = keep
        if not avail:
            break
        while ends and ends[0] <= t:
            heapq.heappop(ends)
        t = ends[0] if ends else t + 1
    return start


def schedule_asap(qodg: QODG, config: HardwareConfig) -> Schedule:
    """Forward scheduling: most critical resource-free gate first, ties by circuit order."""
    priority = [(-c, i) for i, c in enumerate(qodg.criticality)]
    starts = _list_schedule(qodg.gates, qodg.preds, qodg.succs, qodg.durations, priority, config,
                            qodg.resources)
    return _to_schedule(qodg, starts)


def schedule_alap(qodg: QODG, config: HardwareConfig) -> Schedule:
    """Backward scheduling: the forward algorithm on the reversed graph, mapped back to time."""
    n = len(qodg)
    durations = qodg.durations
    rev_crit = [0] * n
    for i in range(n):
        best = 0
        for p in qodg.preds[i]:
            if rev_crit[p] > best:
                best = rev_crit[p]
        rev_crit[i] = durations[i] + best
    priority = [(-rev_crit[i], n - 1 - i) for i in range(n)]
    rstart = _list_schedule(qodg.gates, qodg.succs, qodg.preds, durations, priority, config, qodg.resources)
    horizon = max((rstart[i] + durations[i] for i in range(n)), default=0)
    starts = [horizon - rstart[i] - durations[i] for i in range(n)]
    shift = min(starts, default=0)
    return _to_schedule(qodg, [s - shift for s in starts])


def _to_schedule(qodg: QODG, starts: list[int]) -> Schedule:
    start = {g.id: starts[i] for i, g in enumerate(qodg.gates)}
    latency = max((starts[i] + qodg.durations[i] for i in range(len(starts))), default=0)
    return Schedule(start, latency)


def schedule_latency(qodg: QODG, config: HardwareConfig) -> int:
    return schedule_asap(qodg, config).latency


# -- independent validation ---------------------------------------------------------

@dataclass
class Violation:
    kind: str  # "missing" | "dependency" | "resource" | "topology"
    message: str
    resource: ResourceId | None = None
    gates: tuple[int, ...] = field(default_factory=tuple)

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def validate_schedule(circuit: Circuit, qodg: QODG, schedule: Schedule,
                      config: HardwareConfig) -> Violation | None:
    """Replay a schedule against dependencies and resources; None means legal."""
    by_id = circuit.gate_by_id()
    for gid in by_id:
        if gid not in schedule.start:
            return Violation("missing", f"gate {gid} ({by_id[gid]}) has no start cycle", gates=(gid,))
    for gid, s in schedule.start.items():
        if s < 0:
            return Violation("dependency", f"gate {gid} starts at negative cycle {s}", gates=(gid,))

    for u, v, w in qodg.edges():
        if isinstance(u, int) and isinstance(v, int):
            if schedule.start[v] < schedule.start[u] + w:
                return Violation(
                    "dependency",
                    f"edge {u}->{v}: {by_id[v]} starts at {schedule.start[v]} before "
                    f"{by_id[u]} finishes at {schedule.start[u] + w}",
                    gates=(u, v),
                )

    per_resource: dict[ResourceId, list[Reservation]] = {}
    watches: list[tuple[ResourceId, Reservation]] = []
    for g in circuit.gates:
        try:
            res = resources_for(g, config)
        except SchedulingError as exc:
            return Violation("topology", str(exc), gates=(g.id,))
        s = schedule.start[g.id]
        reservation = Reservation(s, s + gate_duration(config, g.name), g.name, g.id)
        for r in res:
            per_resource.setdefault(r, []).append(reservation)
        watches += [(r, reservation) for r in watched_for(g, config)]

    for r in sorted(per_resource):
        items = sorted(per_resource[r], key=lambda x: (x.start, x.gate_id))
        active: list[Reservation] = []
        for cur in items:
            active = [a for a in active if a.end > cur.start]
            for a in active:
                if not share_compatible(r.kind, a, cur):
                    return Violation(
                        "resource",
                        f"{r}: {by_id[a.gate_id]} [{a.start},{a.end}) overlaps "
                        f"{by_id[cur.gate_id]} [{cur.start},{cur.end})",
                        resource=r,
                        gates=(a.gate_id, cur.gate_id),
                    )
            active.append(cur)
    for r, mine in watches:
        for other in per_resource.get(r, ()):
            if other.overlaps(mine):
                return Violation(
                    "resource",
                    f"{r}: {by_id[mine.gate_id]} [{mine.start},{mine.end}) runs while conflicting "
                    f"{by_id[other.gate_id]} [{other.start},{other.end}) holds it",
                    resource=r,
                    gates=(other.gate_id, mine.gate_id),
                )
    if schedule.latency != max((schedule.start[g.id] + gate_duration(config, g.name) for g in circuit.gates),
                               default=0):
        return Violation("missing", f"latency {schedule.latency} does not match the gate end times")
    return None
