"""Reversible circuits as cascades of multiple-controlled Toffoli/Fredkin gates."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

TOFFOLI = "toffoli"
FREDKIN = "fredkin"

ROLES = ("in", "out", "inout", "wire", "ancilla")


@dataclass(frozen=True)
class Line:
    """One circuit line.

    ``constant`` is the fixed input value of a constant line, ``None`` for
    a primary input.
    """

    name: str
    role: str
    constant: Optional[int] = None
    garbage: bool = False

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    @classmethod
    def for_role(cls, name: str, role: str) -> "Line":
        # Constant value and garbage flag follow from the access modifier.
        constant = 0 if role in ("out", "wire", "ancilla") else None
        garbage = role in ("in", "wire", "ancilla")
        return cls(name, role, constant, garbage)


@dataclass(frozen=True)
class Control:
    line: int
    positive: bool = True


@dataclass(frozen=True)
class Gate:
    kind: str
    controls: Tuple[Control, ...]
    targets: Tuple[int, ...]

    def __post_init__(self):
        if self.kind == TOFFOLI and len(self.targets) != 1:
            raise ValueError("a Toffoli gate has exactly one target")
        if self.kind == FREDKIN and len(self.targets) != 2:
            raise ValueError("a Fredkin gate has exactly two targets")
        if self.kind not in (TOFFOLI, FREDKIN):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        used = [c.line for c in self.controls] + list(self.targets)
        if len(set(used)) != len(used):
            raise ValueError(f"gate lines overlap: {used}")

    @property
    def size(self) -> int:
        return len(self.controls) + len(self.targets)

    @property
    def lines(self) -> Tuple[int, ...]:
        return tuple(c.line for c in self.controls) + self.targets

    def with_controls(self, extra: Sequence[Control]) -> "Gate":
        if not extra:
            return self
        return replace(self, controls=tuple(extra) + self.controls)


def toffoli(target: int, *controls: int) -> Gate:
    """Positive-control Toffoli; ``toffoli(t)`` is NOT, ``toffoli(t, c)`` is CNOT."""
    return Gate(TOFFOLI, tuple(Control(c) for c in controls), (target,))


def fredkin(a: int, b: int, *controls: int) -> Gate:
    return Gate(FREDKIN, tuple(Control(c) for c in controls), (a, b))


def gate_quantum_cost(g: Gate) -> int:
    n = g.size
    if g.kind == TOFFOLI:
        # 2^n - 3 would give -1 for a bare NOT; a NOT costs 1.
        return max(1, 2**n - 3)
    return 2**n - 1


@dataclass(frozen=True)
class CostReport:
    lines: int
    gates: int
    quantum_cost: int


@dataclass
class Circuit:
    lines: List[Line] = field(default_factory=list)
    gates: List[Gate] = field(default_factory=list)
    annotations: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    # signal name -> per-element line ids (LSB first); filled by the synthesizer
    signals: Dict[str, List[List[int]]] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.lines)
        for g in self.gates:
            if any(not 0 <= l < n for l in g.lines):
                raise ValueError(f"gate {g} references an undeclared line")

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    def line_index(self, name: str) -> int:
        for i, line in enumerate(self.lines):
            if line.name == name:
                return i
        raise KeyError(name)

    def append_gate(self, g: Gate, pos=None) -> "Circuit":
        """Return a new circuit with ``g`` appended."""
        out = self.copy()
        out.gates.append(g)
        if pos is not None:
            out.annotations[len(out.gates) - 1] = pos
        out.__post_init__()
        return out

    def copy(self) -> "Circuit":
        return Circuit(list(self.lines), list(self.gates), dict(self.annotations), dict(self.signals))

    def then(self, other: "Circuit") -> "Circuit":
        """Concatenate two cascades over the same lines."""
        if [l.name for l in self.lines] != [l.name for l in other.lines]:
            raise ValueError("circuits have different lines")
        shift = len(self.gates)
        notes = dict(self.annotations)
        notes.update({k + shift: v for k, v in other.annotations.items()})
        return Circuit(list(self.lines), self.gates + other.gates, notes, dict(self.signals))


def reverse(c: Circuit) -> Circuit:
    """The inverse cascade; every gate is self-inverse so only the order flips."""
    last = len(c.gates) - 1
    notes = {last - k: v for k, v in c.annotations.items()}
    return Circuit(list(c.lines), list(reversed(c.gates)), notes, dict(c.signals))


def circuit_cost(c: Circuit) -> CostReport:
    return CostReport(len(c.lines), len(c.gates), sum(gate_quantum_cost(g) for g in c.gates))
