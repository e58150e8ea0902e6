import numpy as np
import pytest

from grover_suppress.circuit import Circuit
from grover_suppress.gates import GateKind, GateOp
from grover_suppress.sim import StateVector

ACCEPTANCE_LINES: list[str] = []


def random_state(q: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=2**q) + 1j * rng.normal(size=2**q)
    return StateVector(q, v / np.linalg.norm(v))


def random_gate(q: int, rng: np.random.Generator) -> GateOp:
    kinds = [GateKind.H, GateKind.X, GateKind.Z]
    if q > 1:
        kinds += [GateKind.MCX, GateKind.MCZ]
    kind = kinds[rng.integers(len(kinds))]
    target = int(rng.integers(q))
    if kind in (GateKind.H, GateKind.X, GateKind.Z):
        return GateOp(kind, target)
    others = [i for i in range(q) if i != target]
    k = int(rng.integers(1, len(others) + 1))
    chosen = rng.choice(others, size=k, replace=False)
    return GateOp(kind, target, tuple((int(c), bool(rng.integers(2))) for c in chosen))


def random_circuit(q: int, length: int, rng: np.random.Generator) -> Circuit:
    return Circuit(q, tuple(random_gate(q, rng) for _ in range(length)))


@pytest.fixture
def rng():
    return np.random.default_rng(20221017)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
