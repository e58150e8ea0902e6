"""Statevector Grover search, amplitude-suppression Grover, and QAOA on a toy TSP."""
from .circuit import Circuit, GateCountReport, adjoint, compose, count_gates, to_closed_controls
from .errors import GroverSuppressError
from .gates import GateKind, GateOp, index_to_label, label_to_index
from .grover import (
    GroverConfig,
    IterationPlan,
    Mode,
    OracleSpec,
    build_classical_oracle,
    build_diffuser,
    build_suppression_oracle,
    closed_form_success,
    grover_state,
    iterate_states,
    plan_iterations,
    run_grover,
    sweep_suppression,
)
from .sim import StateVector, apply_gate, dense_unitary, probabilities, run_circuit, sample, uniform_state

__all__ = [
    "Circuit", "GateCountReport", "adjoint", "compose", "count_gates", "to_closed_controls",
    "GroverSuppressError", "GateKind", "GateOp", "index_to_label", "label_to_index",
    "GroverConfig", "IterationPlan", "Mode", "OracleSpec", "build_classical_oracle",
    "build_diffuser", "build_suppression_oracle", "closed_form_success", "grover_state", "iterate_states",
    "plan_iterations", "run_grover", "sweep_suppression", "StateVector", "apply_gate",
    "dense_unitary", "probabilities", "run_circuit", "sample", "uniform_state",
]
