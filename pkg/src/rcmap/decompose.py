"""Rewriting alias gates into primitives, and single-qubit run merging."""
from __future__ import annotations

from dataclasses import replace
from functools import lru_cache
from typing import Iterable

from .circuit import DECOMPOSED, MOVEMENT, Circuit, Gate
from .config import HardwareConfig, builtin_surface17, rotation_name

SINGLE_QUBIT_ALIASES = frozenset({"h", "z", "s", "sdag", "t", "tdag"})


class DecompositionError(ValueError):
    pass


def expand(config: HardwareConfig, name: str, operands: tuple[int, ...],
           stop: frozenset[str] | None = None) -> list[tuple[str, tuple[int, ...]]]:
    """Fully expand one gate application into (name, operands) pairs.

    Names in ``stop`` are left unexpanded even if a rule exists for them.
    """
    if config.is_primitive(name) or (stop is not None and name in stop):
        return [(name, operands)]
    if name not in config.decompositions:
        raise DecompositionError(f"no decomposition rule for non-primitive gate {name!r}")
    out: list[tuple[str, tuple[int, ...]]] = []
    for step in config.decompositions[name]:
        out += expand(config, step.gate, tuple(operands[r] for r in step.operand_roles), stop)
    return out


def decompose(circuit: Circuit, config: HardwareConfig, only: Iterable[str] | None = None) -> Circuit:
    """Rewrite every non-primitive gate (or only those named in ``only``).

    Output ids are renumbered 0..n-1 in program order.
    """
    targets = None if only is None else frozenset(only)
    gates: list[Gate] = []
    for g in circuit.gates:
        if config.is_primitive(g.name) or (targets is not None and g.name not in targets):
            gates.append(replace(g, id=len(gates)))
            continue
        origin = MOVEMENT if g.origin == MOVEMENT else DECOMPOSED
        for name, ops in expand(config, g.name, g.operands):
            gates.append(Gate(len(gates), name, ops, origin))
    return circuit.with_gates(gates)


@lru_cache(maxsize=None)
def _alias_duration(config: HardwareConfig, name: str) -> int:
    finish: dict[int, int] = {}
    for prim, ops in expand(config, name, tuple(range(config.arity(name)))):
        start = max(finish.get(q, 0) for q in ops)
        for q in ops:
            finish[q] = start + config.gates[prim].duration
    return max(finish.values())


def gate_duration(config: HardwareConfig, name: str) -> int:
    """Primitive duration, or the dependency-only critical path of an alias's expansion."""
    if config.is_primitive(name):
        return config.gates[name].duration
    if name not in config.decompositions:
        raise DecompositionError(f"unknown gate {name!r}")
    return _alias_duration(config, name)


# -- single-qubit optimisation -------------------------------------------------

def _normalize(angle: int) -> int:
    a = angle % 360
    return a - 360 if a > 180 else a


def optimize_1q(circuit: Circuit, config: HardwareConfig | None = None) -> Circuit:
    """Merge adjacent same-axis rotations on each qubit until nothing changes.

    A merged angle of 0 deletes both gates; a merged angle outside the
    primitive set leaves the pair untouched.
    """
    config = config or builtin_surface17()
    rotations = {g.name: g.unitary for g in config.gates.values() if g.is_rotation}
    by_rotation = {(axis, _normalize(angle)): name for name, (axis, angle) in rotations.items()}
    # prefer the canonical spelling for 180 (x rather than rxm180)
    for axis in ("x", "y"):
        by_rotation[(axis, 180)] = rotation_name(axis, 180) if rotation_name(axis, 180) in rotations \
            else by_rotation.get((axis, 180))

    gates: list[Gate] = list(circuit.gates)
    while True:
        changed = False
        out: list[Gate | None] = []
        last: dict[int, int | None] = {}
        for g in gates:
            rot = rotations.get(g.name)
            if rot is not None:
                q = g.operands[0]
                i = last.get(q)
                prev = out[i] if i is not None else None
                prev_rot = rotations.get(prev.name) if prev is not None else None
                if prev_rot is not None and prev_rot[0] == rot[0]:
                    angle = _normalize(prev_rot[1] + rot[1])
                    if angle == 0:
                        out[i] = None
                        last[q] = None
                        changed = True
                        continue
                    merged = by_rotation.get((rot[0], angle))
                    if merged is not None:
                        out[i] = replace(prev, name=merged)
                        changed = True
                        continue
            idx = len(out)
            out.append(g)
            for q in g.operands:
                last[q] = idx
        gates = [g for g in out if g is not None]
        if not changed:
            break
    return circuit.with_gates(gates)
