"""Gate primitives and basis-label conventions.

Qubit 0 is the least-significant bit of a basis index; labels print qubit
``q - 1`` leftmost, so ``int(label, 2)`` is the basis index.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidGateError, InvalidArgumentError


class GateKind(str, enum.Enum):
    H = "H"
    X = "X"
    Z = "Z"
    MCX = "MCX"
    MCZ = "MCZ"


SINGLE_QUBIT_KINDS = frozenset({GateKind.H, GateKind.X, GateKind.Z})
CONTROLLED_KINDS = frozenset({GateKind.MCX, GateKind.MCZ})

# (qubit, closed); closed=True fires on |1>, closed=False (open) fires on |0>
Control = tuple[int, bool]


@dataclass(frozen=True)
class GateOp:
    kind: GateKind
    target: int
    controls: tuple[Control, ...] = ()

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        controls = tuple((int(q), bool(c)) for q, c in self.controls)
        object.__setattr__(self, "controls", controls)
        if self.target < 0:
            raise InvalidGateError(f"negative target {self.target}")
        if kind in SINGLE_QUBIT_KINDS and controls:
            raise InvalidGateError(f"{kind.value} takes no controls")
        if kind in CONTROLLED_KINDS and not controls:
            raise InvalidGateError(f"{kind.value} needs at least one control")
        qubits = [q for q, _ in controls]
        if len(set(qubits)) != len(qubits):
            raise InvalidGateError(f"duplicate control qubits in {qubits}")
        if self.target in qubits:
            raise InvalidGateError(f"target {self.target} is also a control")
        if any(q < 0 for q in qubits):
            raise InvalidGateError("negative control index")

    @classmethod
    def h(cls, target: int) -> GateOp:
        return cls(GateKind.H, target)

    @classmethod
    def x(cls, target: int) -> GateOp:
        return cls(GateKind.X, target)

    @classmethod
    def z(cls, target: int) -> GateOp:
        return cls(GateKind.Z, target)

    @classmethod
    def mcx(cls, target: int, controls: Iterable[Control]) -> GateOp:
        return cls(GateKind.MCX, target, tuple(controls))

    @classmethod
    def mcz(cls, target: int, controls: Iterable[Control]) -> GateOp:
        return cls(GateKind.MCZ, target, tuple(controls))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target, *(q for q, _ in self.controls))

    @property
    def is_controlled(self) -> bool:
        return self.kind in CONTROLLED_KINDS

    def inverse(self) -> GateOp:
        # every supported gate is self-inverse
        return self

    def validate(self, num_qubits: int) -> None:
        bad = [q for q in self.qubits if q >= num_qubits]
        if bad:
            raise InvalidGateError(
                f"{self.dump()} references qubit(s) {bad} on a {num_qubits}-qubit register"
            )

    def dump(self) -> str:
        if not self.controls:
            return f"{self.kind.value} t={self.target}"
        ctl = ",".join(f"{q}{'+' if closed else '-'}" for q, closed in self.controls)
        return f"{self.kind.value} t={self.target} c={ctl}"


def label_to_index(label: str) -> int:
    if not label or set(label) - {"0", "1"}:
        raise InvalidArgumentError(f"not a bitstring: {label!r}")
    return int(label, 2)


def index_to_label(index: int, num_qubits: int) -> str:
    if not 0 <= index < 2**num_qubits:
        raise InvalidArgumentError(f"index {index} out of range for {num_qubits} qubits")
    return format(index, f"0{num_qubits}b")


def controls_for_label(label: str, qubits: Sequence[int] | None = None) -> tuple[Control, ...]:
    """Controls that fire exactly on basis state ``label``.

    Bit ``i`` of the label (counting from the right) maps to ``qubits[i]``,
    default qubit ``i``.
    """
    n = len(label)
    qubits = range(n) if qubits is None else qubits
    bits = label[::-1]
    return tuple((q, bits[i] == "1") for i, q in enumerate(qubits))
