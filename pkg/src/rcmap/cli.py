"""Command line driver: ``rcmap map`` for one circuit, ``rcmap bench`` for a directory."""
from __future__ import annotations

import argparse
import logging
import pathlib
import sys

from .circuit import Circuit, CircuitError, bundle, parse_circuit
from .config import ConfigError, HardwareConfig, resolve_config
from .decompose import decompose, optimize_1q
from .metrics import CircuitStats, ReportRow, circuit_depth, report_csv, report_json, unconstrained_latency
from .oracle import MAX_UNITARY_QUBITS, equivalent
from .pipeline import OPTIMIZE_CHOICES, MapOptions, MapResult, PipelineError, map_circuit
from .router import STRATEGIES, RoutingError

log = logging.getLogger("rcmap")

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _lookback(text: str) -> int | None:
    if text == "full":
        return None
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("lookback must be >= 0 or 'full'")
    return value


def _add_mapping_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default="surface17", help="config document path or 'surface17'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1, help="routing runs per input; the best is kept")
    p.add_argument("--lookback", type=_lookback, default=None, metavar="N|full",
                   help="mapped gates re-scheduled when scoring movements (default full)")
    p.add_argument("--initial-placement", choices=("qap", "trivial"), default=None)
    p.add_argument("--placement-budget", type=float, default=10.0, metavar="SECONDS")
    p.add_argument("--placement-gates", type=int, default=10, metavar="K")
    p.add_argument("--optimize", choices=OPTIMIZE_CHOICES, default=None)
    p.add_argument("--no-moves", action="store_true", help="insert SWAPs only")
    p.add_argument("--metrics", type=pathlib.Path, help="write a CSV report here")
    p.add_argument("--metrics-json", type=pathlib.Path, help="write a JSON report here")
    p.add_argument("--no-timing", action="store_true", help="report time_s as 0 for reproducible reports")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rcmap", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("map", help="map and schedule one circuit")
    m.add_argument("--in", dest="input", type=pathlib.Path, required=True)
    m.add_argument("--out", type=pathlib.Path, help="scheduled output (default stdout)")
    m.add_argument("--strategy", choices=STRATEGIES, default="qmap")
    m.add_argument("--verify", action="store_true", help="check semantic equivalence (<= 6 qubits)")
    m.add_argument("--dump-qodg", type=pathlib.Path, help="write the final dependency graph as DOT")
    _add_mapping_flags(m)

    b = sub.add_parser("bench", help="map every *.qasm file in a directory")
    b.add_argument("--suite", type=pathlib.Path, required=True)
    b.add_argument("--strategies", default="trivial,minpath,qmap")
    _add_mapping_flags(b)
    return parser


def _options(args: argparse.Namespace, strategy: str) -> MapOptions:
    return MapOptions(
        strategy=strategy,
        seed=args.seed,
        restarts=args.restarts,
        initial_placement=args.initial_placement,
        placement_budget=args.placement_budget,
        placement_gates=args.placement_gates,
        optimize=args.optimize,
        lookback=args.lookback,
        use_moves=False if args.no_moves else None,
    )


def baseline_stats(circuit: Circuit, config: HardwareConfig) -> CircuitStats:
    """Characteristics of the unmapped circuit: merged primitives, no topology or control limits."""
    lowered = optimize_1q(decompose(circuit, config), config)
    return CircuitStats(
        qubits=circuit.qubit_count,
        gates=len(lowered.gates),
        two_qubit_gates=sum(1 for g in lowered.gates if len(g.operands) == 2),
        depth=circuit_depth(lowered),
        latency=unconstrained_latency(lowered, config),
    )


def _verify(original: Circuit, result: MapResult, config: HardwareConfig) -> bool | None:
    if original.qubit_count > MAX_UNITARY_QUBITS:
        return None
    unitary_part = original.with_gates(g for g in original.gates if g.name != "measure")
    executed = sorted(result.circuit.gates, key=lambda g: (result.schedule.start[g.id], g.id))
    executed = [g for g in executed if g.name != "measure"]
    check = equivalent(unitary_part, executed, result.routing.initial, result.routing.final, config)
    print(f"verify: fidelity {check.fidelity:.12f} ({'ok' if check.ok else 'FAILED'})")
    return check.ok


def _write_reports(args: argparse.Namespace, rows: list[ReportRow]) -> None:
    if args.metrics:
        args.metrics.write_text(report_csv(rows), encoding="utf-8")
    if args.metrics_json:
        args.metrics_json.write_text(report_json(rows), encoding="utf-8")


def cmd_map(args: argparse.Namespace) -> int:
    config = resolve_config(args.config)
    text = args.input.read_text(encoding="utf-8")
    try:
        circuit = parse_circuit(text, config, name=args.input.stem)
    except CircuitError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = map_circuit(circuit, config, _options(args, args.strategy))
    output = bundle(result.circuit, result.schedule, result.routing.final).render()
    if args.out:
        args.out.write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    if args.dump_qodg:
        args.dump_qodg.write_text(result.qodg.to_dot(), encoding="utf-8")
    print(f"latency {result.stats.latency} cycles, {result.stats.gates} gates, "
          f"{result.stats.swaps} swaps, {result.stats.moves} moves", file=sys.stderr if not args.out else sys.stdout)
    before = baseline_stats(circuit, config)
    _write_reports(args, [ReportRow.build(circuit.name, args.strategy, result.seed, result.stats, before,
                                          timing=not args.no_timing)])
    if args.verify and _verify(circuit, result, config) is False:
        return EXIT_CHECK
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = resolve_config(args.config)
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    unknown = [s for s in strategies if s not in STRATEGIES]
    if unknown:
        print(f"unknown strategies: {', '.join(unknown)}", file=sys.stderr)
        return EXIT_USAGE
    files = sorted(args.suite.glob("*.qasm"))
    if not files:
        print(f"no *.qasm files in {args.suite}", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for path in files:
        try:
            circuit = parse_circuit(path.read_text(encoding="utf-8"), config, name=path.stem)
        except CircuitError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        before = baseline_stats(circuit, config)
        for strategy in strategies:
            result = map_circuit(circuit, config, _options(args, strategy))
            log.info("%s %s latency=%d gates=%d", path.stem, strategy, result.stats.latency, result.stats.gates)
            rows.append(ReportRow.build(path.stem, strategy, result.seed, result.stats, before,
                                        timing=not args.no_timing))
    _write_reports(args, rows)
    sys.stdout.write(report_csv(rows))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "map":
            return cmd_map(args)
        return cmd_bench(args)
    except PipelineError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CHECK
    except (ConfigError, RoutingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


run = main


if __name__ == "__main__":
    sys.exit(main())
