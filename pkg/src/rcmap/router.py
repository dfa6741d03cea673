"""Qubit routing: bring every two-qubit gate onto a coupler by SWAP/MOVE insertion.

Three strategies share one skeleton:

* ``trivial``: gates in input order, first shortest path, the control walks
  up to the target, SWAPs only.
* ``minpath``: dependency-driven order, a uniformly random movement set
  among all shortest paths and meeting points.
* ``qmap``: dependency-driven order; every candidate movement set is
  interleaved with the already-mapped gates by the resource-constrained
  scheduler and one with the smallest latency extension is kept.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import MOVEMENT, Circuit, Gate
from .config import HardwareConfig
from .decompose import expand
from .paths import UnreachableError, all_pairs_distances, shortest_paths
from .placement import VPMap
from .qodg import QODGBuilder, build_qodg
from .scheduler import schedule_asap

STRATEGIES = ("trivial", "minpath", "qmap")

__all__ = [
    "Movement", "MovementSet", "RouteResult", "RoutingError", "STRATEGIES",
    "all_pairs_distances", "shortest_paths", "movement_sets", "select_movements", "route",
]


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class Movement:
    kind: str  # "swap" | "move"
    src: int
    dst: int

    def as_gate(self, gate_id: int) -> Gate:
        return Gate(gate_id, self.kind, (self.src, self.dst), MOVEMENT)


@dataclass(frozen=True)
class MovementSet:
    movements: tuple[Movement, ...]
    path: tuple[int, ...]
    meet: int  # the two operands end up on path[meet], path[meet + 1]

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.path[self.meet], self.path[self.meet + 1]


def movement_sets(path: Sequence[int], vpmap: VPMap, use_moves: bool = True,
                  meets: Sequence[int] | None = None) -> list[MovementSet]:
    """One movement set per meeting edge along ``path``.

    The source side advances ``k`` hops and the target side ``d - 1 - k``.
    A hop is a MOVE when its destination is clean at that point (after the
    earlier hops of the same set), otherwise a SWAP.
    """
    path = tuple(path)
    d = len(path) - 1
    if d < 1:
        raise ValueError("path needs at least one edge")
    out = []
    for k in (range(d) if meets is None else meets):
        clean = set(vpmap.clean)
        hops = [(path[i], path[i + 1]) for i in range(k)]
        hops += [(path[i], path[i - 1]) for i in range(d, k + 1, -1)]
        moves = []
        for a, b in hops:
            if use_moves and b in clean:
                moves.append(Movement("move", a, b))
                clean.discard(b)
                clean.add(a)
            else:
                moves.append(Movement("swap", a, b))
                ca, cb = a in clean, b in clean
                clean.discard(a)
                clean.discard(b)
                if ca:
                    clean.add(b)
                if cb:
                    clean.add(a)
        out.append(MovementSet(tuple(moves), path, k))
    return out


@dataclass
class RoutingState:
    vpmap: VPMap
    prefix: list[Gate] = field(default_factory=list)  # mapped primitives, physical operands
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))
    _builder: QODGBuilder | None = field(default=None, repr=False)
    _built: int = field(default=0, repr=False)

    def window(self, config: HardwareConfig, lookback: int | None) -> QODGBuilder:
        """Dependency graph builder over the mapped gates the scorer looks back on."""
        if lookback is not None:
            window = self.prefix[-lookback:] if lookback > 0 else []
            return QODGBuilder(config).extend(window)
        # the full prefix only grows, so its graph is extended rather than rebuilt
        if self._builder is None or self._builder.config is not config or self._built > len(self.prefix):
            self._builder, self._built = QODGBuilder(config), 0
        self._builder.extend(self.prefix[self._built:])
        self._built = len(self.prefix)
        return self._builder


def _candidates(config: HardwareConfig, gate: Gate, vpmap: VPMap, use_moves: bool) -> list[MovementSet]:
    a, b = (vpmap.forward[q] for q in gate.operands)
    try:
        paths = shortest_paths(config, a, b)
    except UnreachableError as exc:
        raise RoutingError(str(exc)) from exc
    return [ms for p in paths for ms in movement_sets(p, vpmap, use_moves)]


def _primitives(config: HardwareConfig, name: str, operands: tuple[int, ...], start_id: int) -> list[Gate]:
    return [Gate(start_id + i, n, ops) for i, (n, ops) in enumerate(expand(config, name, operands))]


def latency_extension(state: RoutingState, config: HardwareConfig, gate: Gate,
                      candidate: MovementSet, lookback: int | None = None,
                      base: int | None = None, window: QODGBuilder | None = None) -> int:
    """Latency added by appending ``candidate`` plus ``gate`` to the mapped prefix."""
    if window is None:
        window = state.window(config, lookback)
    if base is None:
        base = schedule_asap(window.fork().build(), config).latency
    tail: list[Gate] = []
    next_id = len(state.prefix) + 1
    for mv in candidate.movements:
        tail += _primitives(config, mv.kind, (mv.src, mv.dst), next_id + len(tail))
    tail += _primitives(config, gate.name, candidate.endpoints, next_id + len(tail))
    return schedule_asap(window.fork().extend(tail).build(), config).latency - base


def select_movements(state: RoutingState, gate: Gate, config: HardwareConfig,
                     use_moves: bool = True, lookback: int | None = None) -> MovementSet:
    """Pick the movement set whose interleaving extends the latency least (random among ties)."""
    cands = _candidates(config, gate, state.vpmap, use_moves)
    if len(cands) == 1:
        return cands[0]
    window = state.window(config, lookback)
    base = schedule_asap(window.fork().build(), config).latency
    ext = [latency_extension(state, config, gate, c, lookback, base, window) for c in cands]
    best = min(ext)
    minimal = [c for c, e in zip(cands, ext) if e == best]
    return minimal[int(state.rng.integers(len(minimal)))] if len(minimal) > 1 else minimal[0]


@dataclass
class RouteResult:
    circuit: Circuit
    initial: VPMap
    final: VPMap
    swaps: int = 0
    moves: int = 0


class _Emitter:
    def __init__(self, config: HardwareConfig, state: RoutingState, track_prefix: bool):
        self.config = config
        self.state = state
        self.gates: list[Gate] = []
        self.swaps = 0
        self.moves = 0
        self.track_prefix = track_prefix

    def _append(self, gate: Gate) -> None:
        self.gates.append(gate)
        if self.track_prefix:
            self.state.prefix += _primitives(self.config, gate.name, gate.operands, len(self.state.prefix))

    def movements(self, ms: MovementSet) -> None:
        vpmap = self.state.vpmap
        for mv in ms.movements:
            if mv.kind == "move":
                if mv.dst not in vpmap.clean:
                    raise RoutingError(f"MOVE into q{mv.dst}, which is not clean")
                vpmap.apply_move(mv.src, mv.dst)
                self.moves += 1
            else:
                vpmap.apply_swap(mv.src, mv.dst)
                self.swaps += 1
            self._append(mv.as_gate(len(self.gates)))

    def mapped(self, gate: Gate) -> None:
        phys = tuple(self.state.vpmap.forward[q] for q in gate.operands)
        if len(phys) == 2 and not self.config.is_adjacent(*phys):
            raise RoutingError(f"{gate} mapped onto non-adjacent q{phys[0]}, q{phys[1]}")
        self._append(Gate(len(self.gates), gate.name, phys, gate.origin))


def route(
    circuit: Circuit,
    config: HardwareConfig,
    vpmap: VPMap,
    strategy: str = "qmap",
    seed: int | np.random.Generator | None = 0,
    lookback: int | None = None,
    use_moves: bool | None = None,
) -> RouteResult:
    """Map ``circuit`` onto physical qubits, returning the routed circuit and counters.

    ``use_moves`` defaults to False for ``trivial`` and True otherwise.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    missing = [v for v in range(circuit.qubit_count) if v not in vpmap.forward]
    if missing:
        raise RoutingError(f"virtual qubits {missing} have no physical location")
    all_pairs_distances(config)  # fail early on a disconnected topology
    if use_moves is None:
        use_moves = strategy != "trivial"
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    initial = vpmap.copy()
    state = RoutingState(vpmap.copy(), rng=rng)
    out = _Emitter(config, state, track_prefix=strategy == "qmap")

    if strategy == "trivial":
        for g in circuit.gates:
            if len(g.operands) == 2:
                a, b = (state.vpmap.forward[q] for q in g.operands)
                if not config.is_adjacent(a, b):
                    path = shortest_paths(config, a, b)[0]
                    out.movements(movement_sets(path, state.vpmap, use_moves, meets=[len(path) - 2])[0])
            out.mapped(g)
    else:
        _route_dependency_driven(circuit, config, state, out, strategy, lookback, use_moves)

    routed = Circuit(config.qubit_count, tuple(out.gates), circuit.name)
    return RouteResult(routed, initial, state.vpmap, out.swaps, out.moves)


def _route_dependency_driven(circuit: Circuit, config: HardwareConfig, state: RoutingState,
                             out: _Emitter, strategy: str, lookback: int | None, use_moves: bool) -> None:
    graph = build_qodg(circuit, config)
    crit = graph.criticality
    waiting = [len(p) for p in graph.preds]
    avail = sorted((-crit[i], i) for i in range(len(graph)) if waiting[i] == 0)
    while avail:
        fwd = state.vpmap.forward
        pick = None
        for key in avail:
            g = graph.gates[key[1]]
            if len(g.operands) == 1 or config.is_adjacent(fwd[g.operands[0]], fwd[g.operands[1]]):
                pick = key
                break
        if pick is None:
            pick = avail[0]
            g = graph.gates[pick[1]]
            if strategy == "qmap":
                chosen = select_movements(state, g, config, use_moves, lookback)
            else:
                cands = _candidates(config, g, state.vpmap, use_moves)
                chosen = cands[int(state.rng.integers(len(cands)))]
            out.movements(chosen)
        i = pick[1]
        avail.remove(pick)
        out.mapped(graph.gates[i])
        fresh = False
        for s in graph.succs[i]:
            waiting[s] -= 1
            if waiting[s] == 0:
                avail.append((-crit[s], s))
                fresh = True
        if fresh:
            avail.sort()
