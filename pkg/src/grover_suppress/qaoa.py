"""Toy TSP as QUBO/Ising, and QAOA with uniform or suppression-Grover start.

Encoding: city 0 is pinned to tour position 0; binary variable
``x[(city - 1) * (c - 1) + (pos - 1)]`` says ``city`` sits at ``pos`` for
cities and positions ``1..c-1``. Variable ``i`` is qubit ``i``.
"""
from __future__ import annotations

import enum
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, InvalidInstanceError, InvalidSizeError
from .gates import index_to_label
from .grover import (
    GroverConfig,
    Mode,
    OracleSpec,
    grover_state,
    register_probabilities,
    sweep_suppression,
)
from .optimize import minimize
from .sim import StateVector, probability_vector, uniform_state

BRUTE_FORCE_MAX_VARS = 20
MAX_CITIES = 4
TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TspInstance:
    distances: np.ndarray
    asymmetric: bool = False

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidInstanceError(f"distance matrix must be square, got shape {d.shape}")
        if d.shape[0] < 3:
            raise InvalidInstanceError(f"need at least 3 cities, got {d.shape[0]}")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise InvalidInstanceError("distances must be finite and nonnegative")
        if np.any(np.diag(d) != 0):
            raise InvalidInstanceError("distance matrix diagonal must be zero")
        if not self.asymmetric and not np.allclose(d, d.T):
            raise InvalidInstanceError("distance matrix is not symmetric")
        object.__setattr__(self, "distances", d)

    @property
    def city_count(self) -> int:
        return self.distances.shape[0]

    @property
    def num_vars(self) -> int:
        return (self.city_count - 1) ** 2

    def var(self, city: int, position: int) -> int:
        m = self.city_count - 1
        return (city - 1) * m + (position - 1)

    def tour_cost(self, order: tuple[int, ...]) -> float:
        """Closed-tour length for ``order`` of cities 1..c-1 after city 0."""
        path = (0, *order, 0)
        return float(sum(self.distances[a, b] for a, b in zip(path, path[1:])))

    def label_for(self, order: tuple[int, ...]) -> str:
        idx = 0
        for pos, city in enumerate(order, start=1):
            idx |= 1 << self.var(city, pos)
        return index_to_label(idx, self.num_vars)

    @classmethod
    def from_dict(cls, data: dict) -> TspInstance:
        if not isinstance(data, dict):
            raise InvalidInstanceError("instance must be a JSON object")
        for key in ("cities", "distances"):
            if key not in data:
                raise InvalidInstanceError(f"instance is missing field {key!r}")
        cities = data["cities"]
        if not isinstance(cities, int) or isinstance(cities, bool):
            raise InvalidInstanceError(f"field 'cities' must be an integer, got {cities!r}")
        dist = data["distances"]
        if not isinstance(dist, list) or any(not isinstance(r, list) for r in dist):
            raise InvalidInstanceError("field 'distances' must be a list of lists")
        if len(dist) != cities:
            raise InvalidInstanceError(
                f"field 'distances' has {len(dist)} rows but 'cities' is {cities}"
            )
        try:
            arr = np.array(dist, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidInstanceError(f"field 'distances' is not numeric: {exc}") from None
        return cls(arr, asymmetric=bool(data.get("asymmetric", False)))

    @classmethod
    def load(cls, path: str | Path) -> TspInstance:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInstanceError(f"{path}: malformed JSON ({exc})") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {"cities": self.city_count, "distances": self.distances.tolist()}
        if self.asymmetric:
            out["asymmetric"] = True
        return out


def bundled_instance() -> TspInstance:
    from importlib.resources import files

    return TspInstance.from_dict(
        json.loads(files("grover_suppress").joinpath("data/tsp3.json").read_text())
    )


def _bit_table(num_vars: int) -> np.ndarray:
    idx = np.arange(2**num_vars, dtype=np.int64)
    return ((idx[:, None] >> np.arange(num_vars)) & 1).astype(float)


@dataclass
class Qubo:
    num_vars: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def add_linear(self, i: int, coef: float) -> None:
        self.linear[i] = self.linear.get(i, 0.0) + coef

    def add_quadratic(self, i: int, j: int, coef: float) -> None:
        if i == j:
            self.add_linear(i, coef)  # x*x == x
            return
        key = (min(i, j), max(i, j))
        self.quadratic[key] = self.quadratic.get(key, 0.0) + coef

    def value(self, bits: str | int) -> float:
        idx = int(bits, 2) if isinstance(bits, str) else bits
        x = [(idx >> i) & 1 for i in range(self.num_vars)]
        total = self.offset
        total += sum(c * x[i] for i, c in self.linear.items())
        total += sum(c * x[i] * x[j] for (i, j), c in self.quadratic.items())
        return total

    def values(self) -> np.ndarray:
        """Objective over every basis index."""
        bits = _bit_table(self.num_vars)
        out = np.full(2**self.num_vars, self.offset)
        for i, c in self.linear.items():
            out += c * bits[:, i]
        for (i, j), c in self.quadratic.items():
            out += c * bits[:, i] * bits[:, j]
        return out


@dataclass
class IsingModel:
    num_spins: int
    h: dict[int, float] = field(default_factory=dict)
    J: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def energy(self, bits: str | int) -> float:
        """Energy of a basis state; bit 0 is spin +1, bit 1 is spin -1."""
        idx = int(bits, 2) if isinstance(bits, str) else bits
        z = [1 - 2 * ((idx >> i) & 1) for i in range(self.num_spins)]
        total = self.offset
        total += sum(c * z[i] for i, c in self.h.items())
        total += sum(c * z[i] * z[j] for (i, j), c in self.J.items())
        return total

    def energies(self) -> np.ndarray:
        z = 1.0 - 2.0 * _bit_table(self.num_spins)
        out = np.full(2**self.num_spins, self.offset)
        for i, c in self.h.items():
            out += c * z[:, i]
        for (i, j), c in self.J.items():
            out += c * z[:, i] * z[:, j]
        return out


def default_penalty(instance: TspInstance) -> float:
    bound = instance.city_count * float(instance.distances.max())
    return 2.0 * bound if bound > 0 else 1.0


def tsp_to_qubo(instance: TspInstance, penalty: float | None = None) -> Qubo:
    """Tour length plus ``penalty`` times squared one-hot violations."""
    c = instance.city_count
    if c > MAX_CITIES:
        raise InvalidSizeError(f"at most {MAX_CITIES} cities supported, got {c}")
    penalty = default_penalty(instance) if penalty is None else float(penalty)
    q = Qubo(instance.num_vars)
    bound = c * float(instance.distances.max())
    if penalty <= bound:
        msg = f"penalty {penalty} does not exceed c * max distance = {bound}"
        q.warnings.append(msg)
        warnings.warn(msg, stacklevel=2)

    d = instance.distances
    rest = range(1, c)
    last = c - 1
    for u in rest:
        q.add_linear(instance.var(u, 1), d[0, u])
        q.add_linear(instance.var(u, last), d[u, 0])
    for pos in range(1, last):
        for u in rest:
            for v in rest:
                if u != v:
                    q.add_quadratic(instance.var(u, pos), instance.var(v, pos + 1), d[u, v])

    # (1 - sum x)^2 = 1 - sum x + 2 sum_{a<b} x_a x_b over binary x
    groups = [[instance.var(u, p) for p in rest] for u in rest]
    groups += [[instance.var(u, p) for u in rest] for p in rest]
    for group in groups:
        q.offset += penalty
        for a in group:
            q.add_linear(a, -penalty)
        for a, b in itertools.combinations(group, 2):
            q.add_quadratic(a, b, 2 * penalty)
    return q


def qubo_to_ising(q: Qubo) -> IsingModel:
    """Substitute x = (1 - z) / 2."""
    ising = IsingModel(q.num_vars, offset=q.offset)
    for i, c in q.linear.items():
        ising.offset += c / 2
        ising.h[i] = ising.h.get(i, 0.0) - c / 2
    for (i, j), c in q.quadratic.items():
        ising.offset += c / 4
        ising.h[i] = ising.h.get(i, 0.0) - c / 4
        ising.h[j] = ising.h.get(j, 0.0) - c / 4
        ising.J[(i, j)] = ising.J.get((i, j), 0.0) + c / 4
    return ising


def feasible_orders(instance: TspInstance) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(1, instance.city_count)))


def feasible_labels(instance: TspInstance) -> list[str]:
    labels = [instance.label_for(order) for order in feasible_orders(instance)]
    return sorted(labels, key=lambda s: int(s, 2))


def brute_force_min(q: Qubo) -> tuple[str, float]:
    if q.num_vars > BRUTE_FORCE_MAX_VARS:
        raise InvalidSizeError(
            f"brute force limited to {BRUTE_FORCE_MAX_VARS} variables, got {q.num_vars}"
        )
    values = q.values()
    best = int(np.argmin(values))  # first occurrence: lowest index wins ties
    return index_to_label(best, q.num_vars), float(values[best])


def optimal_labels(q: Qubo) -> list[str]:
    values = q.values()
    lo = values.min()
    return [index_to_label(int(i), q.num_vars) for i in np.flatnonzero(values <= lo + TIE_TOL)]


class InitMode(str, enum.Enum):
    UNIFORM = "uniform"
    SUPPRESSION = "suppression"


@dataclass(frozen=True, eq=False)
class InitialState:
    """QAOA starting state.

    In suppression mode ``state`` carries the Grover ancilla as its top
    qubit. The register is entangled with it, so it is kept as a spectator
    that the QAOA layers never touch; all reported distributions trace it out.
    """

    mode: InitMode
    state: StateVector
    num_vars: int
    grover_iterations: int
    feasible_probability: float

    def register_probabilities(self) -> np.ndarray:
        extra = range(self.num_vars, self.state.num_qubits)
        return probability_vector(self.state, extra)


def _feasible_probability(probs: np.ndarray, labels: list[str]) -> float:
    return float(sum(probs[int(lab, 2)] for lab in labels))


def build_initial_state(
    mode: InitMode | str,
    instance: TspInstance,
    grover_iterations: int | None = None,
) -> InitialState:
    mode = InitMode(mode)
    n = instance.num_vars
    feasible = feasible_labels(instance)
    if mode is InitMode.UNIFORM:
        state = uniform_state(n)
        probs = probability_vector(state)
        return InitialState(mode, state, n, 0, _feasible_probability(probs, feasible))
    if not feasible:
        raise InvalidInstanceError("no feasible tours to keep")
    kept = set(feasible)
    spec = OracleSpec(n, frozenset(index_to_label(i, n) for i in range(2**n)) - kept)
    if grover_iterations is None:
        grover_iterations = sweep_suppression(spec).best_k
    if grover_iterations < 0:
        raise InvalidArgumentError(f"grover_iterations must be >= 0, got {grover_iterations}")
    state = grover_state(GroverConfig(spec, Mode.SUPPRESSION, grover_iterations))
    probs = register_probabilities(state)
    return InitialState(
        mode, state, n, grover_iterations, _feasible_probability(probs, feasible)
    )


def _check_angles(p: int, gammas, betas) -> tuple[np.ndarray, np.ndarray]:
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    betas = np.asarray(betas, dtype=float).reshape(-1)
    if p < 0 or len(gammas) != p or len(betas) != p:
        raise InvalidArgumentError(
            f"need {p} gammas and {p} betas, got {len(gammas)} and {len(betas)}"
        )
    return gammas, betas


def qaoa_amplitudes(
    energies: np.ndarray, num_vars: int, p: int, gammas, betas, initial: StateVector
) -> np.ndarray:
    """Apply p rounds of exp(-i gamma H_C) then exp(-i beta X) on each register qubit.

    Qubits above ``num_vars`` in ``initial`` are left untouched.
    """
    gammas, betas = _check_angles(p, gammas, betas)
    q = initial.num_qubits
    if q < num_vars:
        raise InvalidArgumentError(f"initial state has {q} qubits, cost needs {num_vars}")
    if len(energies) != 2**num_vars:
        raise InvalidArgumentError("energy table does not match num_vars")
    full = np.tile(energies, 2 ** (q - num_vars))
    amps = initial.amplitudes.copy()
    for gamma, beta in zip(gammas, betas):
        amps *= np.exp(-1j * gamma * full)
        c, s = math.cos(beta), math.sin(beta)
        for t in range(num_vars):
            view = amps.reshape(2 ** (q - t - 1), 2, 2**t)
            lo = view[:, 0, :].copy()
            hi = view[:, 1, :]
            view[:, 0, :] = c * lo - 1j * s * hi
            view[:, 1, :] = -1j * s * lo + c * hi
    return amps


def _register_probs(amps: np.ndarray, num_vars: int) -> np.ndarray:
    probs = np.abs(amps) ** 2
    return probs.reshape(-1, 2**num_vars).sum(axis=0)


def qaoa_expected_cost(
    ising: IsingModel, p: int, gammas, betas, initial: StateVector | InitialState
) -> float:
    state = initial.state if isinstance(initial, InitialState) else initial
    energies = ising.energies()
    amps = qaoa_amplitudes(energies, ising.num_spins, p, gammas, betas, state)
    return float(_register_probs(amps, ising.num_spins) @ energies)


@dataclass(frozen=True)
class QaoaConfig:
    instance: TspInstance
    p: int = 1
    init_mode: InitMode = InitMode.UNIFORM
    budget: int = 500
    seed: int = 0
    penalty: float | None = None
    grover_iterations: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "init_mode", InitMode(self.init_mode))
        if self.budget < 1:
            raise InvalidArgumentError(f"budget must be >= 1, got {self.budget}")
        if self.p < 0:
            raise InvalidArgumentError(f"p must be >= 0, got {self.p}")


@dataclass
class QaoaResult:
    mode: InitMode
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    best_expected_cost: float
    final_distribution: dict[str, float]
    optimal_state_probability: float
    evaluations: int
    # (best-so-far expected cost, optimal-state probability at that point)
    trace: list[tuple[float, float]]
    initial_feasible_probability: float
    grover_iterations: int
    optimal_labels: list[str]

    @property
    def best_params(self) -> tuple[float, ...]:
        return (*self.gammas, *self.betas)


def _wrap(params: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    return np.mod(params[:p], 2 * math.pi), np.mod(params[p:], math.pi)


def optimize_qaoa(config: QaoaConfig) -> QaoaResult:
    """Seeded multi-start Nelder-Mead over (gammas, betas), first start at zero."""
    qubo = tsp_to_qubo(config.instance, config.penalty)
    ising = qubo_to_ising(qubo)
    energies = ising.energies()
    n = ising.num_spins
    p = config.p
    init = build_initial_state(config.init_mode, config.instance, config.grover_iterations)

    best = optimal_labels(qubo)
    best_idx = np.array([int(lab, 2) for lab in best])
    trace: list[tuple[float, float]] = []

    def objective(params: np.ndarray) -> float:
        g, b = _wrap(params, p)
        probs = _register_probs(qaoa_amplitudes(energies, n, p, g, b, init.state), n)
        f = float(probs @ energies)
        if not trace or f < trace[-1][0]:
            trace.append((f, float(probs[best_idx].sum())))
        else:
            trace.append(trace[-1])
        return f

    lower = np.zeros(2 * p)
    upper = np.concatenate([np.full(p, 2 * math.pi), np.full(p, math.pi)])
    res = minimize(objective, np.zeros(2 * p), config.budget, seed=config.seed,
                   lower=lower, upper=upper)
    gammas, betas = _wrap(res.x, p)
    probs = _register_probs(qaoa_amplitudes(energies, n, p, gammas, betas, init.state), n)
    return QaoaResult(
        mode=config.init_mode,
        gammas=tuple(float(g) for g in gammas),
        betas=tuple(float(b) for b in betas),
        best_expected_cost=res.fun,
        final_distribution={index_to_label(i, n): float(v) for i, v in enumerate(probs)},
        optimal_state_probability=float(sum(probs[int(lab, 2)] for lab in best)),
        evaluations=res.evaluations,
        trace=trace,
        initial_feasible_probability=init.feasible_probability,
        grover_iterations=init.grover_iterations,
        optimal_labels=best,
    )


@dataclass
class Comparison:
    uniform: QaoaResult
    suppression: QaoaResult

    @property
    def winner(self) -> str:
        u = self.uniform.optimal_state_probability
        s = self.suppression.optimal_state_probability
        if abs(u - s) <= TIE_TOL:
            return "tie"
        return InitMode.SUPPRESSION.value if s > u else InitMode.UNIFORM.value

    def arms(self) -> list[QaoaResult]:
        return [self.uniform, self.suppression]


def compare_initializations(config: QaoaConfig) -> Comparison:
    """Both arms with identical instance, p, budget, seed and penalty."""
    results = {}
    for mode in InitMode:
        cfg = QaoaConfig(
            config.instance, config.p, mode, config.budget, config.seed,
            config.penalty, config.grover_iterations,
        )
        results[mode] = optimize_qaoa(cfg)
    return Comparison(results[InitMode.UNIFORM], results[InitMode.SUPPRESSION])
