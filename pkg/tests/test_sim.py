import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grover_suppress.circuit import Circuit
from grover_suppress.errors import (
    InvalidArgumentError,
    InvalidGateError,
    InvalidSizeError,
    ShapeError,
)
from grover_suppress.gates import GateOp, index_to_label, label_to_index
from grover_suppress.sim import (
    StateVector,
    apply_gate,
    dense_unitary,
    fused_matrix,
    probabilities,
    run_circuit,
    sample,
    uniform_state,
)

from conftest import random_circuit, random_gate, random_state


def test_uniform_state_values():
    assert np.allclose(uniform_state(1).amplitudes, [2**-0.5, 2**-0.5])
    assert np.allclose(uniform_state(3).amplitudes, 0.353553, atol=1e-6)
    assert all(p == pytest.approx(0.25) for p in probabilities(uniform_state(2)).values())


@pytest.mark.parametrize("q", [0, 25])
def test_uniform_state_rejects_size(q):
    with pytest.raises(InvalidSizeError):
        uniform_state(q)


def test_max_qubits_env_override(monkeypatch):
    monkeypatch.setenv("GROVER_SUPPRESS_MAX_QUBITS", "3")
    with pytest.raises(InvalidSizeError):
        uniform_state(4)
    assert uniform_state(3).num_qubits == 3


def test_label_round_trip():
    for i in range(16):
        assert label_to_index(index_to_label(i, 4)) == i
    assert index_to_label(1, 3) == "001"


def test_x_flips_basis():
    out = apply_gate(StateVector.basis("0"), GateOp.x(0))
    assert np.allclose(out.amplitudes, [0, 1])


def test_z_on_plus():
    out = apply_gate(uniform_state(1), GateOp.z(0))
    assert np.allclose(out.amplitudes, np.array([1, -1]) / np.sqrt(2))


def test_mcx_polarity():
    gate = GateOp.mcx(0, [(1, True), (2, False)])
    assert np.allclose(apply_gate(StateVector.basis("010"), gate).amplitudes,
                       StateVector.basis("011").amplitudes)
    assert np.allclose(apply_gate(StateVector.basis("110"), gate).amplitudes,
                       StateVector.basis("110").amplitudes)


def test_gate_out_of_range():
    with pytest.raises(InvalidGateError):
        apply_gate(uniform_state(2), GateOp.x(2))


@pytest.mark.parametrize("bad", [
    lambda: GateOp.mcx(0, []),
    lambda: GateOp.mcx(0, [(0, True)]),
    lambda: GateOp.mcx(0, [(1, True), (1, False)]),
])
def test_gate_invariants(bad):
    with pytest.raises(InvalidGateError):
        bad()


def test_h_takes_no_controls():
    with pytest.raises(InvalidGateError):
        GateOp("H", 0, ((1, True),))


def test_run_circuit_empty_and_hh(rng):
    s = random_state(3, rng)
    assert np.allclose(run_circuit(Circuit(3), s).amplitudes, s.amplitudes)
    out = run_circuit(Circuit(1, (GateOp.h(0), GateOp.h(0))), StateVector.zero(1))
    assert np.allclose(out.amplitudes, [1, 0], atol=1e-12)


def test_run_circuit_shape_error():
    with pytest.raises(ShapeError):
        run_circuit(Circuit(2), uniform_state(3))


def test_single_state_oracle_101():
    # X on Register 1, MCX on all three registers, X on Register 1
    c = Circuit(4, (GateOp.x(1), GateOp.mcx(3, [(0, True), (1, True), (2, True)]), GateOp.x(1)))
    assert np.allclose(run_circuit(c, StateVector.basis("0101")).amplitudes,
                       StateVector.basis("1101").amplitudes)
    assert np.allclose(run_circuit(c, StateVector.basis("0111")).amplitudes,
                       StateVector.basis("0111").amplitudes)


def test_probabilities_basis_and_marginal():
    probs = probabilities(StateVector.basis("11"))
    assert probs == {"00": 0.0, "01": 0.0, "10": 0.0, "11": 1.0}
    # ancilla (top qubit) marginalized away
    s = StateVector(3, np.kron([0, 1], uniform_state(2).amplitudes))
    assert probabilities(s, ancilla=2) == pytest.approx({k: 0.25 for k in ["00", "01", "10", "11"]})


def test_probabilities_dust_is_zero():
    amps = np.array([1.0, 1e-15], dtype=complex)
    amps /= np.linalg.norm(amps)
    assert probabilities(StateVector(1, amps))["1"] == 0.0


def test_sample_contracts():
    assert sample(StateVector.basis("0"), 100, seed=3) == {"0": 100}
    counts = sample(uniform_state(1), 10000, seed=7)
    assert sum(counts.values()) == 10000
    assert abs(counts["0"] - 5000) <= 5 * 50
    assert sample(uniform_state(3), 500, 11) == sample(uniform_state(3), 500, 11)
    with pytest.raises(InvalidArgumentError):
        sample(uniform_state(1), 0, 1)


def test_dense_unitary_examples():
    assert np.allclose(dense_unitary(Circuit(1, (GateOp.x(0),))), [[0, 1], [1, 0]])
    assert np.allclose(dense_unitary(Circuit(1, (GateOp.h(0),))),
                       np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    with pytest.raises(InvalidSizeError):
        dense_unitary(Circuit(13))


def test_dense_reference_random(rng):
    for _ in range(10):
        c = random_circuit(4, 30, rng)
        u = dense_unitary(c)
        assert np.allclose(u.conj().T @ u, np.eye(16), atol=1e-9)
        s = random_state(4, rng)
        assert np.allclose(u @ s.amplitudes, run_circuit(c, s).amplitudes, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), q=st.integers(1, 6))
def test_norm_and_involution(seed, q):
    rng = np.random.default_rng(seed)
    s = random_state(q, rng)
    g = random_gate(q, rng)
    once = apply_gate(s, g)
    assert abs(once.norm() - 1) < 1e-12
    assert np.allclose(apply_gate(once, g).amplitudes, s.amplitudes, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), q=st.integers(2, 6))
def test_control_locality(seed, q):
    rng = np.random.default_rng(seed)
    target = int(rng.integers(q))
    others = [i for i in range(q) if i != target]
    controls = [(c, bool(rng.integers(2))) for c in others]
    gate = GateOp.mcx(target, controls)
    idx = int(rng.integers(2**q))
    label = index_to_label(idx, q)
    satisfied = all(((idx >> c) & 1) == int(closed) for c, closed in controls)
    out = apply_gate(StateVector.basis(label), gate)
    if not satisfied:
        assert np.allclose(out.amplitudes, StateVector.basis(label).amplitudes)
    else:
        assert out.amplitudes[idx ^ (1 << target)] == pytest.approx(1)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), q=st.integers(1, 6), length=st.integers(0, 25))
def test_reference_equivalence_property(seed, q, length):
    rng = np.random.default_rng(seed)
    c = random_circuit(q, length, rng)
    s = random_state(q, rng)
    assert np.allclose(dense_unitary(c) @ s.amplitudes, run_circuit(c, s).amplitudes, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_fused_matrix_matches_dense_reference(q, seed):
    circ = random_circuit(q, 12, np.random.default_rng(seed))
    assert np.allclose(fused_matrix(circ), dense_unitary(circ), atol=1e-12)


def test_fused_matrix_size_limit():
    with pytest.raises(InvalidSizeError):
        fused_matrix(Circuit(11, ()))
