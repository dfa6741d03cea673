"""Initial virtual-to-physical placement.

``place_qap`` minimises sum(w_ij * (dist(p_i, p_j) - 1)) over the first few
two-qubit interactions, exactly by branch-and-bound with Gilmore-Lawler
bounds when small enough, otherwise greedily. ``place_trivial`` maps
virtual qubit i to physical qubit i.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .circuit import Circuit
from .config import HardwareConfig
from .paths import all_pairs_distances

Pair = tuple[int, int]


class PlacementError(ValueError):
    pass


@dataclass
class VPMap:
    forward: dict[int, int]
    reverse: dict[int, int | None]
    clean: set[int] = field(default_factory=set)

    @classmethod
    def from_forward(cls, forward: Mapping[int, int], physical_count: int) -> "VPMap":
        reverse: dict[int, int | None] = {p: None for p in range(physical_count)}
        for v, p in forward.items():
            if reverse.get(p) is not None:
                raise PlacementError(f"physical qubit {p} assigned twice")
            reverse[p] = v
        clean = {p for p, v in reverse.items() if v is None}
        return cls(dict(forward), reverse, clean)

    def copy(self) -> "VPMap":
        return VPMap(dict(self.forward), dict(self.reverse), set(self.clean))

    def apply_swap(self, a: int, b: int) -> None:
        va, vb = self.reverse[a], self.reverse[b]
        self.reverse[a], self.reverse[b] = vb, va
        if va is not None:
            self.forward[va] = b
        if vb is not None:
            self.forward[vb] = a
        ca, cb = a in self.clean, b in self.clean
        self.clean.discard(a)
        self.clean.discard(b)
        if ca:
            self.clean.add(b)
        if cb:
            self.clean.add(a)

    def apply_move(self, a: int, b: int) -> None:
        """Transfer the state on ``a`` into the clean qubit ``b``; ``a`` is left in |0>."""
        if b not in self.clean:
            raise PlacementError(f"MOVE destination q{b} is not clean")
        va = self.reverse[a]
        self.reverse[a], self.reverse[b] = None, va
        if va is not None:
            self.forward[va] = b
        self.clean.discard(b)
        self.clean.add(a)


def interaction_weights(circuit: Circuit, k: int = 10) -> dict[Pair, int]:
    """Interaction counts among the first ``k`` two-qubit gates."""
    weights: dict[Pair, int] = {}
    seen = 0
    for g in circuit.gates:
        if seen >= k:
            break
        if len(g.operands) == 2:
            a, b = g.operands
            key = (min(a, b), max(a, b))
            weights[key] = weights.get(key, 0) + 1
            seen += 1
    return weights


def qap_cost(weights: Mapping[Pair, int], forward: Mapping[int, int], dist: np.ndarray) -> int:
    return int(sum(w * (dist[forward[a], forward[b]] - 1) for (a, b), w in weights.items()))


def place_trivial(circuit: Circuit, config: HardwareConfig) -> VPMap:
    if circuit.qubit_count > config.qubit_count:
        raise PlacementError(f"{circuit.qubit_count} virtual qubits but only {config.qubit_count} physical")
    return VPMap.from_forward({v: v for v in range(circuit.qubit_count)}, config.qubit_count)


@dataclass
class PlacementResult:
    vpmap: VPMap
    cost: int
    exact: bool
    expanded: int


def place_qap(
    weights: Mapping[Pair, int],
    config: HardwareConfig,
    time_budget: float = 10.0,
    virtual_count: int | None = None,
    exact_limit: int = 10,
) -> PlacementResult:
    totals: dict[int, int] = {}
    for (a, b), c in weights.items():
        totals[a] = totals.get(a, 0) + c
        totals[b] = totals.get(b, 0) + c
    # heaviest qubits first: their placement tightens the bound soonest
    involved = sorted(totals, key=lambda v: (-totals[v], v))
    if virtual_count is None:
        virtual_count = (max(totals) + 1) if totals else 0
    if virtual_count > config.qubit_count:
        raise PlacementError(f"{virtual_count} virtual qubits but only {config.qubit_count} physical")
    dist = all_pairs_distances(config)

    forward: dict[int, int] = {}
    exact, expanded = False, 0
    if involved:
        index = {v: i for i, v in enumerate(involved)}
        m = len(involved)
        w = np.zeros((m, m), dtype=int)
        for (a, b), c in weights.items():
            w[index[a], index[b]] += c
            w[index[b], index[a]] += c
        greedy = _greedy(w, dist)
        locs = greedy
        if m <= exact_limit:
            locs, exact, expanded = _branch_and_bound(w, dist, greedy, time_budget)
        forward = {v: int(locs[i]) for i, v in enumerate(involved)}

    _fill_remaining(forward, virtual_count, dist)
    cost = qap_cost(weights, forward, dist)
    if virtual_count and not exact:
        identity = {v: v for v in range(virtual_count)}
        if qap_cost(weights, identity, dist) < cost:
            forward, cost = identity, qap_cost(weights, identity, dist)
    return PlacementResult(VPMap.from_forward(forward, config.qubit_count), cost, exact, expanded)


def _fill_remaining(forward: dict[int, int], virtual_count: int, dist: np.ndarray) -> None:
    # qubits without early interactions go next to the occupied region
    used = set(forward.values())
    for v in range(virtual_count):
        if v in forward:
            continue
        free = [p for p in range(len(dist)) if p not in used]
        if used:
            p = min(free, key=lambda p: (sum(dist[p, u] for u in used), p))
        else:
            p = free[0]
        forward[v] = p
        used.add(p)


def _greedy(w: np.ndarray, dist: np.ndarray) -> list[int]:
    m, n = len(w), len(dist)
    cost = dist - 1
    i, j = np.unravel_index(int(np.argmax(np.triu(w, 1))), w.shape) if m > 1 else (0, 0)
    locs = [-1] * m
    if m == 1:
        locs[0] = 0
        return locs
    a, b = next((a, b) for a in range(n) for b in range(n) if dist[a, b] == 1)
    locs[i], locs[j] = a, b
    placed = [i, j]
    while len(placed) < m:
        rest = [v for v in range(m) if locs[v] < 0]
        v = max(rest, key=lambda v: (sum(w[v, u] for u in placed), -v))
        used = {locs[u] for u in placed}
        best = min(
            (p for p in range(n) if p not in used),
            key=lambda p: (sum(w[v, u] * cost[p, locs[u]] for u in placed),
                           sum(dist[p, locs[u]] for u in placed), p),
        )
        locs[v] = best
        placed.append(v)
    return locs


def _assignment_cost(w: np.ndarray, cost: np.ndarray, locs) -> int:
    m = len(locs)
    return int(sum(w[i, j] * cost[locs[i], locs[j]] for i in range(m) for j in range(i + 1, m)))


def _lower_bound(w: np.ndarray, cost: np.ndarray, locs: list[int], k: int, free: list[int],
                 enough: Callable[[float], bool] | None = None) -> float:
    """Gilmore-Lawler bound for the assignment of qubits k..m-1 onto ``free``.

    If the cheaper row-minimum bound already satisfies ``enough`` it is
    returned without solving the assignment problem.
    """
    m = len(w)
    fixed = _assignment_cost(w, cost, locs[:k])
    if k == m:
        return fixed
    free_arr = np.array(free)
    # linear part: interaction with already placed qubits
    lin = (w[k:, :k] @ cost[np.ix_(locs[:k], free_arr)]).astype(float)
    # quadratic part: pair weights of i against sorted distances from l to other free slots
    if m - k > 1:
        sub = cost[np.ix_(free_arr, free_arr)].astype(float)
        np.fill_diagonal(sub, np.inf)
        sub.sort(axis=1)
        sub = sub[:, : m - k - 1]
        ww = w[k:, k:].astype(float)
        np.fill_diagonal(ww, -1.0)
        ww = -np.sort(-ww, axis=1)[:, : m - k - 1]
        lin += (ww @ sub.T) / 2.0
    quick = fixed + float(lin.min(axis=1).sum())
    if enough is not None and enough(quick):
        return quick
    rows, cols = linear_sum_assignment(lin)
    return fixed + float(lin[rows, cols].sum())


def _branch_and_bound(w: np.ndarray, dist: np.ndarray, incumbent: list[int],
                      time_budget: float) -> tuple[list[int], bool, int]:
    m, n = len(w), len(dist)
    cost = dist - 1
    best_locs = list(incumbent)
    # the greedy cost plus a half stops ties from being pruned before the
    # first optimum in search order is reached
    best = _assignment_cost(w, cost, incumbent) + 0.5
    deadline = time.monotonic() + time_budget
    expanded = 0
    timed_out = False
    locs = [-1] * m
    used = [False] * n

    def hopeless(bound: float) -> bool:
        # costs are integers: a subtree helps only if ceil(bound) < best
        return math.ceil(bound - 1e-9) >= best

    def dfs(k: int) -> None:
        nonlocal best, best_locs, expanded, timed_out
        if timed_out:
            return
        if k == m:
            c = _assignment_cost(w, cost, locs)
            if c < best:
                best, best_locs = c, list(locs)
            return
        expanded += 1
        if time.monotonic() > deadline:
            timed_out = True
            return
        for p in range(n):
            if used[p]:
                continue
            locs[k] = p
            used[p] = True
            free = [q for q in range(n) if not used[q]]
            if not hopeless(_lower_bound(w, cost, locs, k + 1, free, hopeless)):
                dfs(k + 1)
            used[p] = False
            locs[k] = -1

    dfs(0)
    return best_locs, not timed_out, expanded


def exhaustive_qap(weights: Mapping[Pair, int], config: HardwareConfig) -> tuple[int, dict[int, int]]:
    """Reference optimum by trying every injective assignment (tiny instances only)."""
    involved = sorted({q for pair in weights for q in pair})
    dist = all_pairs_distances(config)
    best_cost, best_fwd = None, {}
    for perm in permutations(range(config.qubit_count), len(involved)):
        fwd = dict(zip(involved, perm))
        c = qap_cost(weights, fwd, dist)
        if best_cost is None or c < best_cost:
            best_cost, best_fwd = c, fwd
    return (best_cost or 0), best_fwd
