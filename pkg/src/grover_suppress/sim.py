"""Dense statevector simulation and a dense-unitary reference evaluator."""
from __future__ import annotations

import functools
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuit import Circuit
from .errors import InvalidArgumentError, InvalidSizeError, ShapeError
from .gates import GateKind, GateOp, index_to_label

DEFAULT_MAX_QUBITS = 24
DENSE_MAX_QUBITS = 12
NORM_TOL = 1e-10
DUST = 1e-14

_SQRT_HALF = 1.0 / np.sqrt(2.0)


def max_qubits() -> int:
    """Simulation ceiling; ``GROVER_SUPPRESS_MAX_QUBITS`` overrides the default."""
    env = os.environ.get("GROVER_SUPPRESS_MAX_QUBITS")
    return int(env) if env else DEFAULT_MAX_QUBITS


def _check_size(q: int) -> None:
    if q < 1 or q > max_qubits():
        raise InvalidSizeError(f"qubit count {q} outside [1, {max_qubits()}]")


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_size(self.num_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ShapeError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} qubits, got {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"state not normalized (norm^2 = {norm:.3e})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, label: str) -> StateVector:
        amps = np.zeros(2 ** len(label), dtype=complex)
        amps[int(label, 2)] = 1.0
        return cls(len(label), amps)

    @classmethod
    def zero(cls, num_qubits: int) -> StateVector:
        _check_size(num_qubits)
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self, upper: StateVector) -> StateVector:
        """``upper`` occupies the new high-index qubits."""
        return StateVector(
            self.num_qubits + upper.num_qubits, np.kron(upper.amplitudes, self.amplitudes)
        )


def uniform_state(q: int) -> StateVector:
    _check_size(q)
    dim = 2**q
    return StateVector(q, np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))


@functools.lru_cache(maxsize=256)
def _controlled_indices(q: int, target: int, controls: tuple, target_bit: int) -> np.ndarray:
    mask = 0
    value = 0
    for c, closed in controls:
        mask |= 1 << c
        if closed:
            value |= 1 << c
    mask |= 1 << target
    value |= target_bit << target
    idx = np.arange(2**q, dtype=np.int64)
    return idx[(idx & mask) == value]


def _apply_inplace(amps: np.ndarray, gate: GateOp, q: int) -> None:
    """Apply ``gate`` along axis 0 of ``amps``; trailing axes are batch axes."""
    t = gate.target
    kind = gate.kind
    if kind in (GateKind.H, GateKind.X, GateKind.Z):
        view = amps.reshape(2 ** (q - t - 1), 2, 2**t, *amps.shape[1:])
        lo = view[:, 0]
        hi = view[:, 1]
        if kind is GateKind.X:
            tmp = lo.copy()
            lo[...] = hi
            hi[...] = tmp
        elif kind is GateKind.Z:
            hi *= -1
        else:
            a = lo.copy()
            lo[...] = (a + hi) * _SQRT_HALF
            hi[...] = (a - hi) * _SQRT_HALF
        return
    if kind is GateKind.MCX:
        low = _controlled_indices(q, t, gate.controls, 0)
        high = low | (1 << t)
        tmp = amps[low].copy()
        amps[low] = amps[high]
        amps[high] = tmp
    else:
        amps[_controlled_indices(q, t, gate.controls, 1)] *= -1


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    gate.validate(state.num_qubits)
    amps = state.amplitudes.copy()
    _apply_inplace(amps, gate, state.num_qubits)
    return StateVector(state.num_qubits, amps)


def run_circuit(circuit: Circuit, initial: StateVector) -> StateVector:
    if circuit.num_qubits != initial.num_qubits:
        raise ShapeError(
            f"circuit has {circuit.num_qubits} qubits but state has {initial.num_qubits}"
        )
    amps = initial.amplitudes.copy()
    for gate in circuit.gates:
        _apply_inplace(amps, gate, circuit.num_qubits)
    return StateVector(circuit.num_qubits, amps)


FUSE_MAX_QUBITS = 10


@functools.lru_cache(maxsize=64)
def fused_matrix(circuit: Circuit) -> np.ndarray:
    """Whole-circuit unitary built by pushing the identity through the strided kernel.

    Used to speed up repeated application of small circuits; ``dense_unitary``
    stays the independent reference.
    """
    q = circuit.num_qubits
    if q > FUSE_MAX_QUBITS:
        raise InvalidSizeError(f"fusion limited to {FUSE_MAX_QUBITS} qubits, got {q}")
    m = np.eye(2**q, dtype=complex)
    for gate in circuit.gates:
        _apply_inplace(m, gate, q)
    return m


def probability_vector(state: StateVector, marginalize: Iterable[int] = ()) -> np.ndarray:
    """Probabilities over the qubits not listed in ``marginalize``.

    Kept qubits retain their relative order, so marginalizing the top-index
    ancilla leaves register indices unchanged.
    """
    probs = np.abs(state.amplitudes) ** 2
    probs[np.abs(state.amplitudes) < DUST] = 0.0
    drop = sorted(set(marginalize))
    if not drop:
        return probs
    q = state.num_qubits
    if any(not 0 <= d < q for d in drop):
        raise InvalidArgumentError(f"marginalized qubits {drop} out of range")
    # axis j of the reshaped tensor is qubit q-1-j
    tensor = probs.reshape((2,) * q)
    return tensor.sum(axis=tuple(q - 1 - d for d in drop)).reshape(-1)


def probabilities(state: StateVector, ancilla: int | None = None) -> dict[str, float]:
    drop = () if ancilla is None else (ancilla,)
    probs = probability_vector(state, drop)
    width = state.num_qubits - len(drop)
    return {index_to_label(i, width): float(p) for i, p in enumerate(probs)}


def sample(
    state: StateVector, shots: int, seed: int, ancilla: int | None = None
) -> dict[str, int]:
    if shots < 1:
        raise InvalidArgumentError(f"shots must be >= 1, got {shots}")
    drop = () if ancilla is None else (ancilla,)
    probs = probability_vector(state, drop)
    width = state.num_qubits - len(drop)
    counts = np.random.default_rng(seed).multinomial(shots, probs / probs.sum())
    return {index_to_label(i, width): int(c) for i, c in enumerate(counts) if c}


# Reference evaluator: builds every gate as an explicit Kronecker product.
# Deliberately shares no code with the strided path above.

_I2 = np.eye(2, dtype=complex)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_MATS = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
_MATS[GateKind.MCX] = _MATS[GateKind.X]
_MATS[GateKind.MCZ] = _MATS[GateKind.Z]


def _kron_chain(factors: dict[int, np.ndarray], q: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for qubit in reversed(range(q)):
        out = np.kron(out, factors.get(qubit, _I2))
    return out


def gate_matrix(gate: GateOp, q: int) -> np.ndarray:
    gate.validate(q)
    base = _MATS[gate.kind]
    if not gate.controls:
        return _kron_chain({gate.target: base}, q)
    fire = {c: (_P1 if closed else _P0) for c, closed in gate.controls}
    projector = _kron_chain(fire, q)
    active = _kron_chain({**fire, gate.target: base}, q)
    return np.eye(2**q, dtype=complex) - projector + active


def dense_unitary(circuit: Circuit) -> np.ndarray:
    q = circuit.num_qubits
    if q > DENSE_MAX_QUBITS:
        raise InvalidSizeError(f"dense unitary limited to {DENSE_MAX_QUBITS} qubits, got {q}")
    u = np.eye(2**q, dtype=complex)
    for gate in circuit.gates:
        u = gate_matrix(gate, q) @ u
    return u


__all__ = [
    "StateVector",
    "uniform_state",
    "apply_gate",
    "run_circuit",
    "probabilities",
    "probability_vector",
    "sample",
    "dense_unitary",
    "gate_matrix",
    "max_qubits",
]
