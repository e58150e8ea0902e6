"""Budgeted Nelder-Mead with seeded restarts.

Every objective call counts against one shared evaluation budget, so two
runs with equal budgets see exactly the same number of evaluations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5


class _BudgetExhausted(Exception):
    pass


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    evaluations: int
    # best-so-far objective after each evaluation
    trace: list[float] = field(default_factory=list)
    starts: int = 0


class _Counter:
    def __init__(self, fn: Callable[[np.ndarray], float], budget: int):
        self.fn = fn
        self.budget = budget
        self.calls = 0
        self.best_x: np.ndarray | None = None
        self.best_f = np.inf
        self.trace: list[float] = []

    def __call__(self, x: np.ndarray) -> float:
        if self.calls >= self.budget:
            raise _BudgetExhausted
        f = float(self.fn(x))
        self.calls += 1
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, dtype=float)
        self.trace.append(self.best_f)
        return f


def _nelder_mead(f, x0: np.ndarray, step: float, xtol: float, ftol: float) -> None:
    dim = len(x0)
    simplex = [np.array(x0, dtype=float)]
    for i in range(dim):
        v = np.array(x0, dtype=float)
        v[i] += step
        simplex.append(v)
    values = [f(v) for v in simplex]

    while True:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        if values[-1] - values[0] <= ftol and spread <= xtol:
            return

        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = f(xr)
        if fr < values[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + CONTRACT * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + CONTRACT * (worst - centroid)
            fc = f(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, len(simplex)):
            simplex[i] = best + SHRINK * (simplex[i] - best)
            values[i] = f(simplex[i])


def minimize(
    fn: Callable[[np.ndarray], float],
    x0: np.ndarray,
    budget: int,
    *,
    seed: int = 0,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
    step: float = 0.5,
    xtol: float = 1e-8,
    ftol: float = 1e-12,
) -> OptimizeResult:
    """Minimize ``fn`` from ``x0``, restarting at seeded random points in
    ``[lower, upper)`` whenever a simplex converges, until ``budget`` calls.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    x0 = np.asarray(x0, dtype=float)
    rng = np.random.default_rng(seed)
    lower = np.zeros_like(x0) if lower is None else np.asarray(lower, dtype=float)
    upper = np.ones_like(x0) if upper is None else np.asarray(upper, dtype=float)
    counter = _Counter(fn, budget)
    starts = 0
    start = x0
    try:
        if len(x0) == 0:
            counter(x0)
            raise _BudgetExhausted
        while True:
            starts += 1
            _nelder_mead(counter, start, step, xtol, ftol)
            start = rng.uniform(lower, upper)
    except _BudgetExhausted:
        pass
    return OptimizeResult(
        x=counter.best_x if counter.best_x is not None else x0,
        fun=counter.best_f,
        evaluations=counter.calls,
        trace=counter.trace,
        starts=starts,
    )
