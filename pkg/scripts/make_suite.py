"""Write a seeded suite of random circuits as .qasm files for ``rcmap bench``."""
import argparse
import pathlib

import numpy as np

from rcmap.circuit import emit_unscheduled
from rcmap.generate import random_circuit


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("out", type=pathlib.Path)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--qubits", type=int, nargs=2, default=(3, 12), metavar=("MIN", "MAX"))
    p.add_argument("--gates", type=int, nargs=2, default=(20, 200), metavar=("MIN", "MAX"))
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        n = int(rng.integers(args.qubits[0], args.qubits[1] + 1))
        m = int(rng.integers(args.gates[0], args.gates[1] + 1))
        c = random_circuit(n, m, rng, measure=True, name=f"rand{i:03d}_q{n}_g{m}")
        (args.out / f"{c.name}.qasm").write_text(emit_unscheduled(c), encoding="utf-8")
    print(f"wrote {args.count} circuits to {args.out}")


if __name__ == "__main__":
    main()
