"""Hardware description: gate set, topology and classical-control tables.

A config document is a JSON tree. ``load_config`` parses and validates it,
``dump_config`` writes it back out, and ``builtin_surface17`` returns the
shipped Surface-17 description (``data/surface17.json``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from itertools import combinations
from typing import Any, Mapping

Edge = tuple[int, int]

ROTATION_ANGLES = frozenset({45, -45, 90, -90, 180, -180})
GATE_KINDS = ("single_qubit_rotation", "two_qubit", "measurement")


class ConfigError(ValueError):
    pass


class ConfigParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    pass


@dataclass(frozen=True)
class GateSpec:
    name: str
    arity: int
    duration: int
    kind: str
    # ("x"|"y", degrees) for rotations, "cz" for the two-qubit gate, None otherwise
    unitary: tuple[str, int] | str | None = None

    @property
    def is_rotation(self) -> bool:
        return self.kind == "single_qubit_rotation"


@dataclass(frozen=True)
class DecompositionStep:
    gate: str
    operand_roles: tuple[int, ...]


@dataclass(frozen=True)
class HardwareConfig:
    qubit_count: int
    cycle_time_ns: int
    gates: Mapping[str, GateSpec]
    edges: tuple[Edge, ...]
    decompositions: Mapping[str, tuple[DecompositionStep, ...]]
    awgs: tuple[frozenset[int], ...]
    feedlines: tuple[frozenset[int], ...]
    cz_edge_conflicts: Mapping[Edge, frozenset[Edge]]
    cz_detuned_qubits: Mapping[Edge, frozenset[int]]

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        # configs key several lru caches; hashing the fields each time is costly
        return hash((self.qubit_count, self.edges, tuple(self.gates)))

    @cached_property
    def awg_of(self) -> tuple[int, ...]:
        owner = [0] * self.qubit_count
        for i, group in enumerate(self.awgs):
            for q in group:
                owner[q] = i
        return tuple(owner)

    @cached_property
    def feedline_of(self) -> tuple[int, ...]:
        owner = [0] * self.qubit_count
        for i, group in enumerate(self.feedlines):
            for q in group:
                owner[q] = i
        return tuple(owner)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def undirected_edges(self) -> tuple[Edge, ...]:
        """Distinct couplers as (min, max) pairs, in first-appearance order."""
        seen: dict[Edge, None] = {}
        for a, b in self.edges:
            seen.setdefault((min(a, b), max(a, b)), None)
        return tuple(seen)

    @cached_property
    def coupler_index(self) -> dict[Edge, int]:
        """Directed edge -> index of its physical coupler (shared by both directions)."""
        index = {e: i for i, e in enumerate(self.undirected_edges)}
        return {(a, b): index[(min(a, b), max(a, b))] for a, b in self.edges}

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[set[int]] = [set() for _ in range(self.qubit_count)]
        for a, b in self.edges:
            adj[a].add(b)
        return tuple(tuple(sorted(s)) for s in adj)

    def is_adjacent(self, a: int, b: int) -> bool:
        return (a, b) in self.edge_set

    def is_primitive(self, name: str) -> bool:
        return name in self.gates

    def arity(self, name: str) -> int:
        if name in self.gates:
            return self.gates[name].arity
        if name in self.decompositions:
            return 1 + max(r for step in self.decompositions[name] for r in step.operand_roles)
        raise KeyError(name)

    def known_gate(self, name: str) -> bool:
        return name in self.gates or name in self.decompositions


# -- parsing -----------------------------------------------------------------

_REQUIRED_KEYS = (
    "qubit_count",
    "cycle_time_ns",
    "gates",
    "edges",
    "decompositions",
    "awgs",
    "feedlines",
    "cz_edge_conflicts",
    "cz_detuned_qubits",
)


def _edge_key(text: str) -> Edge:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigParseError(f"bad edge key {text!r}; expected 'src,dst'") from exc
    return (a, b)


def _as_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParseError(f"{what} must be an integer, got {value!r}")
    return value


def _as_edge(value: Any, what: str) -> Edge:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigParseError(f"{what} must be a [src, dst] pair, got {value!r}")
    return (_as_int(value[0], what), _as_int(value[1], what))


def _parse_unitary(raw: Any, name: str) -> tuple[str, int] | str | None:
    if raw is None or isinstance(raw, str):
        return raw
    if isinstance(raw, dict) and set(raw) == {"axis", "angle"}:
        return (str(raw["axis"]).lower(), _as_int(raw["angle"], f"gate {name} angle"))
    raise ConfigParseError(f"gate {name}: unrecognised unitary descriptor {raw!r}")


def config_from_tree(tree: Any) -> HardwareConfig:
    if not isinstance(tree, dict):
        raise ConfigParseError("config document must be a JSON object")
    missing = [k for k in _REQUIRED_KEYS if k not in tree]
    if missing:
        raise ConfigParseError(f"missing keys: {', '.join(missing)}")

    gates: dict[str, GateSpec] = {}
    for raw in tree["gates"]:
        try:
            name = str(raw["name"]).lower()
            spec = GateSpec(
                name=name,
                arity=_as_int(raw["arity"], f"gate {name} arity"),
                duration=_as_int(raw["duration"], f"gate {name} duration"),
                kind=str(raw["kind"]),
                unitary=_parse_unitary(raw.get("unitary"), name),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigParseError(f"malformed gate entry {raw!r}") from exc
        if name in gates:
            raise ConfigValidationError(f"duplicate gate {name!r}")
        gates[name] = spec

    decompositions: dict[str, tuple[DecompositionStep, ...]] = {}
    for name, steps in tree["decompositions"].items():
        try:
            decompositions[name.lower()] = tuple(
                DecompositionStep(
                    gate=str(s["gate"]).lower(),
                    operand_roles=tuple(_as_int(r, f"{name} role") for r in s["operand_roles"]),
                )
                for s in steps
            )
        except (KeyError, TypeError) as exc:
            raise ConfigParseError(f"malformed decomposition for {name!r}") from exc

    config = HardwareConfig(
        qubit_count=_as_int(tree["qubit_count"], "qubit_count"),
        cycle_time_ns=_as_int(tree["cycle_time_ns"], "cycle_time_ns"),
        gates=gates,
        edges=tuple(_as_edge(e, "edge") for e in tree["edges"]),
        decompositions=decompositions,
        awgs=tuple(frozenset(_as_int(q, "awg qubit") for q in g) for g in tree["awgs"]),
        feedlines=tuple(frozenset(_as_int(q, "feedline qubit") for q in g) for g in tree["feedlines"]),
        cz_edge_conflicts={
            _edge_key(k): frozenset(_as_edge(e, "conflict edge") for e in v)
            for k, v in tree["cz_edge_conflicts"].items()
        },
        cz_detuned_qubits={
            _edge_key(k): frozenset(_as_int(q, "detuned qubit") for q in v)
            for k, v in tree["cz_detuned_qubits"].items()
        },
    )
    validate_config(config)
    return config


def load_config(text: str) -> HardwareConfig:
    try:
        tree = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"malformed config document: {exc}") from exc
    return config_from_tree(tree)


def config_to_tree(config: HardwareConfig) -> dict[str, Any]:
    def unitary(spec: GateSpec) -> Any:
        if isinstance(spec.unitary, tuple):
            return {"axis": spec.unitary[0], "angle": spec.unitary[1]}
        return spec.unitary

    return {
        "qubit_count": config.qubit_count,
        "cycle_time_ns": config.cycle_time_ns,
        "gates": [
            {"name": g.name, "arity": g.arity, "duration": g.duration, "kind": g.kind, "unitary": unitary(g)}
            for g in config.gates.values()
        ],
        "edges": [list(e) for e in config.edges],
        "decompositions": {
            name: [{"gate": s.gate, "operand_roles": list(s.operand_roles)} for s in steps]
            for name, steps in config.decompositions.items()
        },
        "awgs": [sorted(g) for g in config.awgs],
        "feedlines": [sorted(g) for g in config.feedlines],
        "cz_edge_conflicts": {
            f"{a},{b}": [list(e) for e in sorted(v)] for (a, b), v in config.cz_edge_conflicts.items()
        },
        "cz_detuned_qubits": {f"{a},{b}": sorted(v) for (a, b), v in config.cz_detuned_qubits.items()},
    }


def dump_config(config: HardwareConfig) -> str:
    return json.dumps(config_to_tree(config), indent=1)


# -- validation --------------------------------------------------------------

def _fail(msg: str) -> None:
    raise ConfigValidationError(msg)


def validate_config(config: HardwareConfig) -> None:
    """Raise ConfigValidationError naming the first violated invariant."""
    n = config.qubit_count
    if n < 1:
        _fail("qubit_count must be positive")
    if config.cycle_time_ns < 1:
        _fail("cycle_time_ns must be positive")

    for g in config.gates.values():
        if g.duration < 1:
            _fail(f"gate {g.name}: duration must be >= 1")
        if g.kind not in GATE_KINDS:
            _fail(f"gate {g.name}: unknown kind {g.kind!r}")
        expected_arity = 2 if g.kind == "two_qubit" else 1
        if g.arity != expected_arity:
            _fail(f"gate {g.name}: arity {g.arity} does not match kind {g.kind}")
        if g.kind == "single_qubit_rotation":
            if not isinstance(g.unitary, tuple):
                _fail(f"gate {g.name}: rotation needs an axis/angle descriptor")
            axis, angle = g.unitary
            if axis not in ("x", "y"):
                _fail(f"gate {g.name}: rotation axis must be x or y")
            if angle not in ROTATION_ANGLES:
                _fail(f"gate {g.name}: rotation angle {angle} not in +-45/+-90/+-180")

    def in_range(q: int, what: str) -> None:
        if not 0 <= q < n:
            _fail(f"{what}: qubit {q} out of range 0..{n - 1}")

    edges = set(config.edges)
    if len(edges) != len(config.edges):
        _fail("duplicate edge")
    for a, b in config.edges:
        in_range(a, "edge")
        in_range(b, "edge")
        if a == b:
            _fail(f"self-loop edge ({a},{b})")
        if (b, a) not in edges:
            _fail(f"asymmetric edge: ({a},{b}) present but ({b},{a}) missing")

    for label, groups in (("awg", config.awgs), ("feedline", config.feedlines)):
        seen: dict[int, int] = {}
        for i, group in enumerate(groups):
            for q in group:
                in_range(q, f"{label} {i}")
                if q in seen:
                    _fail(f"qubit {q} appears in two {label} groups ({seen[q]} and {i})")
                seen[q] = i
        absent = sorted(set(range(n)) - set(seen))
        if absent:
            _fail(f"qubits {absent} are not in any {label} group")

    for table_name, table in (("cz_edge_conflicts", config.cz_edge_conflicts),
                              ("cz_detuned_qubits", config.cz_detuned_qubits)):
        for key in table:
            if key not in edges:
                _fail(f"{table_name}: key {key} is not an edge")
        unkeyed = edges - set(table)
        if unkeyed:
            _fail(f"{table_name}: edges {sorted(unkeyed)} have no entry")
    for e, conflicts in config.cz_edge_conflicts.items():
        for other in conflicts:
            if other not in edges:
                _fail(f"cz_edge_conflicts[{e}]: {other} is not an edge")
            if e not in config.cz_edge_conflicts[other]:
                _fail(f"cz_edge_conflicts is not symmetric: {other} in [{e}] but not vice versa")
    for e, detuned in config.cz_detuned_qubits.items():
        for q in detuned:
            in_range(q, f"cz_detuned_qubits[{e}]")
            if q in e:
                _fail(f"cz_detuned_qubits[{e}]: lists its own endpoint {q}")

    _validate_decompositions(config)


def _validate_decompositions(config: HardwareConfig) -> None:
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(name: str) -> None:
        if name in config.gates:
            return
        if name not in config.decompositions:
            _fail(f"decomposition references unknown gate {name!r}")
        if state.get(name) == 1:
            _fail(f"decomposition cycle through {name!r}")
        if state.get(name) == 2:
            return
        state[name] = 1
        steps = config.decompositions[name]
        if not steps:
            _fail(f"decomposition of {name!r} is empty")
        for step in steps:
            visit(step.gate)
            if len(step.operand_roles) != config.arity(step.gate):
                _fail(f"decomposition of {name!r}: {step.gate} needs {config.arity(step.gate)} operands")
            if len(set(step.operand_roles)) != len(step.operand_roles) or min(step.operand_roles) < 0:
                _fail(f"decomposition of {name!r}: bad operand roles {step.operand_roles}")
        state[name] = 2

    for name in config.decompositions:
        if name in config.gates:
            _fail(f"{name!r} is both a primitive and a decomposition")
        visit(name)


# -- Surface-17 --------------------------------------------------------------

# Rotated distance-3 lattice drawn as rows of 2,3,2,3,2,3,2 qubits. The
# 3-wide rows are data qubits, the 2-wide rows ancillas. Frequency groups:
# f1 (high) = data outside the middle row, f2 = ancillas, f3 (low) = {7, 8, 9}.
S17_EDGES = (
    (0, 2), (0, 3), (1, 3), (1, 4),
    (2, 5), (3, 5), (3, 6), (4, 6),
    (5, 7), (5, 8), (6, 8), (6, 9),
    (7, 10), (8, 10), (8, 11), (9, 11),
    (10, 12), (10, 13), (11, 13), (11, 14),
    (12, 15), (13, 15), (13, 16), (14, 16),
)
S17_FREQUENCY_GROUPS = (
    frozenset({2, 3, 4, 12, 13, 14}),
    frozenset({0, 1, 5, 6, 10, 11, 15, 16}),
    frozenset({7, 8, 9}),
)
S17_FEEDLINES = (
    frozenset({0, 1, 2, 3, 4}),
    frozenset({5, 6, 7, 8, 9, 10, 11}),
    frozenset({12, 13, 14, 15, 16}),
)


def _rot(name: str, axis: str, angle: int) -> dict[str, Any]:
    return {"name": name, "arity": 1, "duration": 1, "kind": "single_qubit_rotation",
            "unitary": {"axis": axis, "angle": angle}}


def default_gate_table() -> list[dict[str, Any]]:
    gates = []
    for axis in ("x", "y"):
        for angle in (45, -45, 90, -90, 180, -180):
            gates.append(_rot(rotation_name(axis, angle), axis, angle))
    gates.append({"name": "cz", "arity": 2, "duration": 2, "kind": "two_qubit", "unitary": "cz"})
    gates.append({"name": "measure", "arity": 1, "duration": 15, "kind": "measurement", "unitary": None})
    return gates


def rotation_name(axis: str, angle: int) -> str:
    if angle == 180:
        return axis
    return f"r{axis}{'m' if angle < 0 else ''}{abs(angle)}"


def _steps(*items: tuple[str, int] | tuple[str, int, int]) -> list[dict[str, Any]]:
    return [{"gate": it[0], "operand_roles": list(it[1:])} for it in items]


def default_decompositions() -> dict[str, list[dict[str, Any]]]:
    # Steps are listed in application order (leftmost applied first).
    return {
        "z": _steps(("x", 0), ("y", 0)),
        "h": _steps(("ry90", 0), ("x", 0)),
        "t": _steps(("ry90", 0), ("rx45", 0), ("rym90", 0)),
        "tdag": _steps(("ry90", 0), ("rxm45", 0), ("rym90", 0)),
        "s": _steps(("ry90", 0), ("rx90", 0), ("rym90", 0)),
        "sdag": _steps(("ry90", 0), ("rxm90", 0), ("rym90", 0)),
        "cnot": _steps(("rym90", 1), ("cz", 0, 1), ("ry90", 1)),
        "swap": _steps(
            ("rym90", 1), ("cz", 0, 1), ("ry90", 1),
            ("rym90", 0), ("cz", 0, 1), ("ry90", 0),
            ("rym90", 1), ("cz", 0, 1), ("ry90", 1),
        ),
        "move": _steps(
            ("rym90", 1), ("cz", 0, 1), ("ry90", 1),
            ("rym90", 0), ("cz", 0, 1), ("ry90", 0),
        ),
    }


def derive_cz_tables(
    edges: tuple[Edge, ...], frequency_groups: tuple[frozenset[int], ...]
) -> tuple[dict[Edge, frozenset[Edge]], dict[Edge, frozenset[int]]]:
    """Build the CZ conflict and detuning tables from frequency groups.

    The higher-frequency endpoint is flux-pulsed towards its partner; its
    other neighbours in the partner's group must be parked. Two CZs conflict
    when their endpoint-plus-parked qubit sets intersect.
    """
    level = {q: i for i, g in enumerate(frequency_groups) for q in g}
    adj: dict[int, set[int]] = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    detuned: dict[Edge, frozenset[int]] = {}
    for a, b in edges:
        high, low = (a, b) if level[a] < level[b] else (b, a)
        if level[low] - level[high] != 1:
            raise ConfigValidationError(f"edge ({a},{b}) does not join adjacent frequency groups")
        detuned[(a, b)] = frozenset(q for q in adj[high] if level[q] == level[low] and q != low)

    footprint = {e: frozenset(e) | detuned[e] for e in edges}
    conflicts: dict[Edge, set[Edge]] = {e: set() for e in edges}
    for e, f in combinations(edges, 2):
        if footprint[e] & footprint[f]:
            conflicts[e].add(f)
            conflicts[f].add(e)
    return {e: frozenset(v) for e, v in conflicts.items()}, detuned


def surface17_tree() -> dict[str, Any]:
    directed: list[Edge] = []
    for a, b in S17_EDGES:
        directed += [(a, b), (b, a)]
    conflicts, detuned = derive_cz_tables(tuple(directed), S17_FREQUENCY_GROUPS)
    return {
        "qubit_count": 17,
        "cycle_time_ns": 20,
        "gates": default_gate_table(),
        "edges": [list(e) for e in directed],
        "decompositions": default_decompositions(),
        "awgs": [sorted(g) for g in S17_FREQUENCY_GROUPS],
        "feedlines": [sorted(g) for g in S17_FEEDLINES],
        "cz_edge_conflicts": {f"{a},{b}": [list(x) for x in sorted(v)] for (a, b), v in conflicts.items()},
        "cz_detuned_qubits": {f"{a},{b}": sorted(v) for (a, b), v in detuned.items()},
    }


_BUILTIN: HardwareConfig | None = None


def builtin_surface17() -> HardwareConfig:
    global _BUILTIN
    if _BUILTIN is None:
        text = resources.files("rcmap").joinpath("data/surface17.json").read_text(encoding="utf-8")
        _BUILTIN = load_config(text)
    return _BUILTIN


def resolve_config(spec: str) -> HardwareConfig:
    """Accept either the name ``surface17`` or a path to a config document."""
    if spec.lower() in ("surface17", "surface-17", "s17"):
        return builtin_surface17()
    with open(spec, encoding="utf-8") as fh:
        return load_config(fh.read())
