"""Gate and latency cost of SWAP-only routing versus routing with MOVEs.

Uses the clean-ancilla suite: a handful of virtual qubits pinned to distant
Surface-17 sites, so routing paths cross clean qubits.
"""
from rcmap.config import builtin_surface17
from rcmap.generate import clean_ancilla_suite
from rcmap.pipeline import MapOptions, map_once

STRATEGIES = ("trivial", "minpath", "qmap")


def main() -> None:
    config = builtin_surface17()
    print("circuit,strategy,gates_swap,gates_move,latency_swap,latency_move,moves,gate_reduction")
    best = {s: 0.0 for s in STRATEGIES}
    for c, vp in clean_ancilla_suite():
        for s in STRATEGIES:
            a, b = (map_once(c, config, MapOptions(s, seed=1, use_moves=mv, optimize="none"), vp.copy(), 1).stats
                    for mv in (False, True))
            red = 1 - b.gates / a.gates
            best[s] = max(best[s], red)
            print(f"{c.name},{s},{a.gates},{b.gates},{a.latency},{b.latency},{b.moves},{red:.3f}")
    for s in STRATEGIES:
        print(f"# {s}: largest gate reduction {best[s]:.1%}")


if __name__ == "__main__":
    main()
