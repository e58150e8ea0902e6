"""Flat circuit container, composition, adjoint and gate counting."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import InvalidGateError, ShapeError
from .gates import GateKind, GateOp


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[GateOp, ...] = ()
    ancilla_index: int | None = None

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ShapeError(f"circuit needs at least one qubit, got {self.num_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            g.validate(self.num_qubits)
        if self.ancilla_index is not None and not 0 <= self.ancilla_index < self.num_qubits:
            raise InvalidGateError(f"ancilla index {self.ancilla_index} out of range")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def extend(self, gates: Iterable[GateOp]) -> Circuit:
        return Circuit(self.num_qubits, self.gates + tuple(gates), self.ancilla_index)

    def widen(self, num_qubits: int, ancilla_index: int | None = None) -> Circuit:
        """Same gates on a register with extra (higher-index) qubits."""
        if num_qubits < self.num_qubits:
            raise ShapeError(f"cannot narrow {self.num_qubits} qubits to {num_qubits}")
        anc = self.ancilla_index if ancilla_index is None else ancilla_index
        return Circuit(num_qubits, self.gates, anc)

    def dump(self) -> str:
        return "\n".join(g.dump() for g in self.gates)


@dataclass(frozen=True)
class GateCountReport:
    single_qubit_count: int = 0
    multi_controlled_count: int = 0
    total: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.single_qubit_count + self.multi_controlled_count)


def compose(a: Circuit, b: Circuit) -> Circuit:
    if a.num_qubits != b.num_qubits:
        raise ShapeError(f"cannot compose {a.num_qubits}-qubit and {b.num_qubits}-qubit circuits")
    anc = a.ancilla_index if a.ancilla_index is not None else b.ancilla_index
    return Circuit(a.num_qubits, a.gates + b.gates, anc)


def adjoint(c: Circuit) -> Circuit:
    return Circuit(c.num_qubits, tuple(g.inverse() for g in reversed(c.gates)), c.ancilla_index)


def count_gates(c: Circuit) -> GateCountReport:
    """Each H/X/Z counts one; each MCX/MCZ counts one whatever its arity."""
    multi = sum(1 for g in c.gates if g.is_controlled)
    return GateCountReport(len(c.gates) - multi, multi)


def to_closed_controls(c: Circuit) -> Circuit:
    """Rewrite open controls as closed controls conjugated by X gates.

    No cancellation of adjacent X pairs is done; the result is the literal
    hardware-agnostic realization used for counting.
    """
    out: list[GateOp] = []
    for g in c.gates:
        opened = [q for q, closed in g.controls if not closed]
        if not opened:
            out.append(g)
            continue
        flips = [GateOp.x(q) for q in opened]
        out.extend(flips)
        out.append(GateOp(g.kind, g.target, tuple((q, True) for q, _ in g.controls)))
        out.extend(flips)
    return Circuit(c.num_qubits, tuple(out), c.ancilla_index)


def layer(kind: GateKind, qubits: Iterable[int], num_qubits: int) -> Circuit:
    return Circuit(num_qubits, tuple(GateOp(kind, q) for q in qubits))
