"""Classical Grover search and the amplitude-suppression variant.

Register qubits are ``0..n-1``; the ancilla is qubit ``n``.

Classical mode marks target states with phase kickback from an ancilla in
``|->`` and reflects the register about the prepared state. Suppression mode
leaves the ancilla in ``|0>``: the oracle sends every desired state (the
complement of the undesired set ``S``) to ancilla ``|1>`` with a ``-1`` phase
and the diffuser flips the phase of ``|0...0>`` over all ``n + 1`` qubits.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .circuit import Circuit, adjoint, compose, layer
from .errors import InvalidArgumentError, InvalidSizeError, InvalidSpecError
from .gates import GateKind, GateOp, controls_for_label, index_to_label
from .sim import FUSE_MAX_QUBITS, StateVector, fused_matrix, probability_vector, run_circuit


class Mode(str, enum.Enum):
    CLASSICAL = "classical"
    SUPPRESSION = "suppression"


def _check_labels(labels: Iterable[str], n: int, what: str) -> list[str]:
    labels = list(labels)
    for lab in labels:
        if len(lab) != n or set(lab) - {"0", "1"}:
            raise InvalidSpecError(f"{what} label {lab!r} is not a {n}-bit string")
    if len(set(labels)) != len(labels):
        raise InvalidSpecError(f"duplicate {what} labels")
    return labels


@dataclass(frozen=True)
class OracleSpec:
    """Register size ``n`` and the set ``S`` of undesired basis labels."""

    n: int
    undesired: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSpecError(f"register size must be >= 1, got {self.n}")
        labels = _check_labels(self.undesired, self.n, "undesired")
        object.__setattr__(self, "undesired", frozenset(labels))

    @property
    def num_states(self) -> int:
        return 2**self.n

    @property
    def desired(self) -> frozenset[str]:
        return frozenset(
            index_to_label(i, self.n) for i in range(self.num_states)
        ) - self.undesired

    def f(self, label: str) -> int:
        return int(label not in self.undesired)


@dataclass(frozen=True)
class IterationPlan:
    num_states: int
    bound_count: int
    paper_bound: int
    marked_count: int
    optimal_k: int


@dataclass(frozen=True)
class GroverConfig:
    spec: OracleSpec
    mode: Mode = Mode.CLASSICAL
    iterations: int = 1
    # classical mode only; None marks the desired set (complement of S)
    targets: frozenset[str] | None = None
    state_prep: Circuit | None = None
    trailing_x: bool = False
    # None = mode default (register-only for classical, full for suppression)
    diffuser_spans_ancilla: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.iterations < 0:
            raise InvalidArgumentError(f"iterations must be >= 0, got {self.iterations}")
        if self.targets is not None:
            object.__setattr__(self, "targets", frozenset(self.targets))
        if self.state_prep is not None and self.state_prep.num_qubits != self.spec.n:
            raise InvalidSpecError("state_prep must act on exactly the register qubits")

    @property
    def marked(self) -> frozenset[str]:
        if self.mode is Mode.SUPPRESSION or self.targets is None:
            return self.spec.desired
        return self.targets


def _sorted_labels(labels: Iterable[str]) -> list[str]:
    return sorted(labels, key=lambda s: int(s, 2))


def build_classical_oracle(spec: OracleSpec, targets: Iterable[str]) -> Circuit:
    """One polarity-matched MCX onto the ancilla per target state."""
    labels = _check_labels(targets, spec.n, "target")
    if not labels:
        raise InvalidSpecError("classical oracle needs at least one target")
    n = spec.n
    gates = [GateOp.mcx(n, controls_for_label(lab)) for lab in labels]
    return Circuit(n + 1, tuple(gates), ancilla_index=n)


def build_suppression_oracle(
    spec: OracleSpec, trailing_x: bool = False, enumerate_set: str = "auto"
) -> Circuit:
    """Oracle that leaves ``S`` on ancilla ``|0>`` and phases the rest.

    ``enumerate_set`` picks which side gets one MCX per state: ``"undesired"``
    (X on the ancilla first, then the ``S`` MCX gates), ``"desired"`` (MCX over
    the complement, no leading X) or ``"auto"`` for whichever is smaller, ties
    going to ``S``. Both choices realize the same unitary.
    """
    n = spec.n
    S = spec.undesired
    if not S:
        raise InvalidSpecError("suppression oracle needs a nonempty undesired set")
    if len(S) == spec.num_states:
        raise InvalidSpecError("undesired set covers every state; nothing to keep")
    desired = spec.desired
    if enumerate_set == "auto":
        enumerate_set = "undesired" if len(S) <= len(desired) else "desired"
    if enumerate_set not in ("undesired", "desired"):
        raise InvalidArgumentError(f"unknown enumerate_set {enumerate_set!r}")

    gates: list[GateOp] = []
    if enumerate_set == "undesired":
        gates.append(GateOp.x(n))
        gates.extend(GateOp.mcx(n, controls_for_label(s)) for s in _sorted_labels(S))
    else:
        gates.extend(GateOp.mcx(n, controls_for_label(s)) for s in _sorted_labels(desired))
    gates.append(GateOp.z(n))
    if trailing_x:
        gates.append(GateOp.x(n))
    return Circuit(n + 1, tuple(gates), ancilla_index=n)


def _phase_flip_zero(qubits: list[int]) -> list[GateOp]:
    flips = [GateOp.x(q) for q in qubits]
    top, rest = qubits[-1], qubits[:-1]
    core = GateOp.mcz(top, [(q, True) for q in rest]) if rest else GateOp.z(top)
    return [*flips, core, *flips]


def build_diffuser(
    num_qubits: int,
    n_register: int | None = None,
    *,
    include_ancilla: bool = True,
    state_prep: Circuit | None = None,
    exact_sign: bool = False,
) -> Circuit:
    """Prep-conjugated phase flip of ``|0...0>``.

    The drawn X-MCZ-X realization gives ``A (I - 2|0><0|) A^dagger``, which is
    ``-(2|psi><psi| - I)`` with ``|psi> = A|0>``. ``exact_sign`` appends
    Z X Z X (= -I) on qubit 0 to remove the global sign. The flip spans the
    ancilla (qubits above ``n_register``) only when ``include_ancilla`` is set.
    """
    if num_qubits < 2:
        raise InvalidSizeError(f"diffuser needs >= 2 qubits, got {num_qubits}")
    n = num_qubits - 1 if n_register is None else n_register
    if not 1 <= n <= num_qubits:
        raise InvalidSizeError(f"register size {n} invalid for {num_qubits} qubits")
    prep = layer(GateKind.H, range(n), n) if state_prep is None else state_prep
    if prep.num_qubits != n:
        raise InvalidSpecError("state_prep must act on exactly the register qubits")
    prep = prep.widen(num_qubits)
    spanned = list(range(num_qubits if include_ancilla else n))
    flip = Circuit(num_qubits, tuple(_phase_flip_zero(spanned)))
    anc = n if n < num_qubits else None
    gates = compose(compose(adjoint(prep), flip), prep).gates
    if exact_sign:
        gates += (GateOp.z(0), GateOp.x(0), GateOp.z(0), GateOp.x(0))
    return Circuit(num_qubits, gates, anc)


def closed_form_success(N: int, m: int, k: int) -> float:
    if not 1 <= m <= N:
        raise InvalidArgumentError(f"need 1 <= m <= N, got m={m}, N={N}")
    if k < 0:
        raise InvalidArgumentError(f"k must be >= 0, got {k}")
    theta = math.asin(math.sqrt(m / N))
    return math.sin((2 * k + 1) * theta) ** 2


def plan_iterations(
    spec: OracleSpec, mode: Mode | str, targets: Iterable[str] | None = None
) -> IterationPlan:
    mode = Mode(mode)
    N = spec.num_states
    if mode is Mode.SUPPRESSION:
        bound_count = len(spec.undesired)
        marked = len(spec.desired)
    else:
        marked_set = spec.desired if targets is None else frozenset(targets)
        bound_count = marked = len(marked_set)
    if bound_count == 0 or marked == 0:
        raise InvalidSpecError(f"{mode.value} plan needs a nonempty driving set")
    theta = math.asin(math.sqrt(marked / N))
    return IterationPlan(
        num_states=N,
        bound_count=bound_count,
        paper_bound=-(-N // bound_count),
        marked_count=marked,
        optimal_k=math.floor(math.pi / (4 * theta)),
    )


@dataclass(frozen=True)
class GroverCircuits:
    prep: Circuit
    oracle: Circuit
    diffuser: Circuit

    def full(self, iterations: int) -> Circuit:
        c = self.prep
        for _ in range(iterations):
            c = compose(compose(c, self.oracle), self.diffuser)
        return c


def build_circuits(config: GroverConfig) -> GroverCircuits:
    spec = config.spec
    n = spec.n
    q = n + 1
    reg_prep = config.state_prep or layer(GateKind.H, range(n), n)
    if config.mode is Mode.CLASSICAL:
        targets = config.marked
        if not targets:
            raise InvalidSpecError("classical mode needs at least one target")
        oracle = build_classical_oracle(spec, _sorted_labels(targets))
        prep = reg_prep.widen(q, ancilla_index=n).extend([GateOp.x(n), GateOp.h(n)])
        spans = bool(config.diffuser_spans_ancilla)
    else:
        oracle = build_suppression_oracle(spec, trailing_x=config.trailing_x)
        prep = reg_prep.widen(q, ancilla_index=n)
        spans = config.diffuser_spans_ancilla is None or config.diffuser_spans_ancilla
    diffuser = build_diffuser(q, n, include_ancilla=spans, state_prep=config.state_prep)
    return GroverCircuits(prep, oracle, diffuser)


def iterate_states(config: GroverConfig) -> Iterator[StateVector]:
    """Joint register+ancilla states after 0, 1, ..., ``config.iterations`` rounds."""
    parts = build_circuits(config)
    q = config.spec.n + 1
    state = run_circuit(parts.prep, StateVector.zero(q))
    yield state
    if config.iterations == 0:
        return
    if q <= FUSE_MAX_QUBITS:
        rnd = fused_matrix(parts.diffuser) @ fused_matrix(parts.oracle)
        amps = state.amplitudes
        for _ in range(config.iterations):
            amps = rnd @ amps
            yield StateVector(q, amps)
        return
    for _ in range(config.iterations):
        state = run_circuit(parts.diffuser, run_circuit(parts.oracle, state))
        yield state


def grover_state(config: GroverConfig) -> StateVector:
    """Joint register+ancilla state after prep and ``k`` Grover rounds."""
    for state in iterate_states(config):
        pass
    return state


def register_probabilities(state: StateVector) -> np.ndarray:
    return probability_vector(state, (state.num_qubits - 1,))


def run_grover(config: GroverConfig) -> dict[str, float]:
    probs = register_probabilities(grover_state(config))
    n = config.spec.n
    return {index_to_label(i, n): float(p) for i, p in enumerate(probs)}


def set_probability(probs: dict[str, float], labels: Iterable[str]) -> float:
    return float(sum(probs[lab] for lab in labels))


@dataclass(frozen=True)
class SweepResult:
    """Undesired-set probability for each iteration count tried."""

    table: tuple[tuple[int, float], ...]
    best_k: int
    best_undesired_probability: float
    plan: IterationPlan = field(repr=False)


def sweep_suppression(
    spec: OracleSpec,
    k_max: int | None = None,
    *,
    state_prep: Circuit | None = None,
    trailing_x: bool = False,
) -> SweepResult:
    """Run k = 1..k_max (default the ``ceil(N/M)`` bound) and keep the k minimizing P(S)."""
    plan = plan_iterations(spec, Mode.SUPPRESSION)
    k_max = plan.paper_bound if k_max is None else k_max
    if k_max < 1:
        raise InvalidArgumentError(f"k_max must be >= 1, got {k_max}")
    cfg = GroverConfig(
        spec, Mode.SUPPRESSION, k_max, state_prep=state_prep, trailing_x=trailing_x
    )
    undesired_idx = np.array([int(s, 2) for s in spec.undesired])
    table = []
    for k, state in enumerate(iterate_states(cfg)):
        if k:
            table.append((k, float(register_probabilities(state)[undesired_idx].sum())))
    best_k, best_p = min(table, key=lambda row: (row[1], row[0]))
    return SweepResult(tuple(table), best_k, best_p, plan)
