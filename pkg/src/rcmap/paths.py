"""Hop distances and shortest-path enumeration on the coupling graph."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .config import HardwareConfig


class UnreachableError(ValueError):
    pass


def floyd_warshall(n: int, edges) -> np.ndarray:
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0)
    for a, b in edges:
        dist[a, b] = 1
        dist[b, a] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :])
    return dist


@lru_cache(maxsize=None)
def _distances(config: HardwareConfig) -> np.ndarray:
    dist = floyd_warshall(config.qubit_count, config.edges)
    if np.isinf(dist).any():
        a, b = map(int, np.argwhere(np.isinf(dist))[0])
        raise UnreachableError(f"topology is disconnected: no path from q{a} to q{b}")
    out = dist.astype(int)
    out.setflags(write=False)
    return out


def all_pairs_distances(config: HardwareConfig) -> np.ndarray:
    """Symmetric hop-count matrix; raises UnreachableError on a disconnected topology."""
    return _distances(config)


@lru_cache(maxsize=None)
def _paths(config: HardwareConfig, a: int, b: int) -> tuple[tuple[int, ...], ...]:
    dist = all_pairs_distances(config)
    frontier: list[tuple[int, ...]] = [(a,)]
    # breadth-first, only taking steps that bring us one hop closer to b
    for _ in range(int(dist[a, b])):
        frontier = [p + (nb,) for p in frontier for nb in config.neighbors[p[-1]]
                    if dist[nb, b] == dist[p[-1], b] - 1]
    return tuple(frontier)


def shortest_paths(config: HardwareConfig, a: int, b: int) -> list[tuple[int, ...]]:
    """Every minimum-hop vertex sequence from ``a`` to ``b`` (neighbours in ascending id)."""
    if a == b:
        raise ValueError("shortest_paths needs two distinct qubits")
    return list(_paths(config, a, b))
