"""Compare the three routing strategies on random circuits.

Writes one CSV row per (circuit, strategy) and prints how often qmap's
latency is at most minpath's, plus mean overheads over the unmapped baseline.
"""
import argparse
import pathlib
import sys
import time

import numpy as np

from rcmap.cli import baseline_stats
from rcmap.config import resolve_config
from rcmap.generate import random_circuit
from rcmap.metrics import ReportRow, report_csv
from rcmap.pipeline import MapOptions, map_circuit

STRATEGIES = ("trivial", "minpath", "qmap")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--qubits", type=int, nargs=2, default=(8, 12))
    p.add_argument("--gates", type=int, nargs=2, default=(50, 200))
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=6)
    p.add_argument("--config", default="surface17")
    p.add_argument("--csv", type=pathlib.Path, help="default stdout")
    args = p.parse_args()

    config = resolve_config(args.config)
    rng = np.random.default_rng(args.seed)
    rows, latency = [], {s: [] for s in STRATEGIES}
    t0 = time.perf_counter()
    for i in range(args.count):
        n = int(rng.integers(args.qubits[0], args.qubits[1] + 1))
        m = int(rng.integers(args.gates[0], args.gates[1] + 1))
        c = random_circuit(n, m, int(rng.integers(2 ** 32)), name=f"rand{i:03d}")
        before = baseline_stats(c, config)
        for s in STRATEGIES:
            res = map_circuit(c, config, MapOptions(s, seed=i, restarts=args.restarts))
            rows.append(ReportRow.build(c.name, s, res.seed, res.stats, before))
            latency[s].append(res.stats.latency)
        print(f"{i + 1}/{args.count} {c.name}: " + " ".join(f"{s}={latency[s][-1]}" for s in STRATEGIES),
              file=sys.stderr)

    text = report_csv(rows)
    if args.csv:
        args.csv.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    q, mp = np.array(latency["qmap"]), np.array(latency["minpath"])
    print(f"qmap <= minpath latency on {np.mean(q <= mp):.1%} of circuits", file=sys.stderr)
    for s in STRATEGIES:
        oh = [r.latency_overhead for r in rows if r.strategy == s and r.latency_overhead is not None]
        go = [r.gate_overhead for r in rows if r.strategy == s and r.gate_overhead is not None]
        print(f"{s:8s} mean latency overhead {np.mean(oh):.2f}, gate overhead {np.mean(go):.2f}", file=sys.stderr)
    print(f"{time.perf_counter() - t0:.0f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
