"""Oracle gate-count growth: closed-form curves and measured circuits.

The workload is the "everything except all-zeros and all-ones" query. The
classical oracle enumerates the ``2**n - 2`` desired states; the suppression
oracle enumerates the two undesired ones.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .circuit import count_gates, to_closed_controls
from .errors import InvalidArgumentError
from .grover import OracleSpec, build_classical_oracle, build_suppression_oracle

MIN_N = 2
MAX_N = 20
# above this the classical oracle (n * 2**n control entries) is counted
# gate-by-gate without materializing GateOp objects
BUILD_LIMIT = 12
CSV_HEADER = (
    "n",
    "classical_formula",
    "suppression_formula",
    "classical_measured_polarity",
    "classical_measured_xconj",
    "suppression_measured",
)


def classical_formula(n: int) -> int:
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if n > 62:
        raise OverflowError(f"n={n} exceeds the 62-qubit integer range")
    literal = (2**n - 2) + 2 * sum(math.comb(n, i) for i in range(1, n + 1))
    closed = 3 * 2**n - 4
    assert literal == closed, (n, literal, closed)
    return closed


def suppression_formula(n: int) -> int:
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    return 4 + 2 * n


def extremes_spec(n: int) -> OracleSpec:
    return OracleSpec(n, frozenset({"0" * n, "1" * n}))


@dataclass(frozen=True)
class GrowthRow:
    n: int
    classical_formula: int
    suppression_formula: int
    classical_measured_polarity: int
    classical_measured_xconj: int
    # X-conjugation realization; this is the one the 4 + 2n curve counts
    suppression_measured: int
    suppression_measured_polarity: int

    def csv_fields(self) -> tuple[int, ...]:
        return tuple(getattr(self, name) for name in CSV_HEADER)


def _check_n(n: int) -> None:
    if not MIN_N <= n <= MAX_N:
        raise InvalidArgumentError(f"n must be in [{MIN_N}, {MAX_N}], got {n}")


def streamed_classical_counts(n: int) -> tuple[int, int]:
    """(polarity, X-conjugation) totals of the classical extremes oracle.

    One MCX per desired state; the X-conjugated form adds an X pair for each
    zero bit, i.e. each open control.
    """
    states = np.arange(1, 2**n - 1, dtype=np.int64)
    ones = sum(((states >> b) & 1).sum() for b in range(n))
    polarity = len(states)
    open_controls = n * polarity - int(ones)
    return polarity, polarity + 2 * open_controls


def measure_oracles(n: int) -> GrowthRow:
    _check_n(n)
    spec = extremes_spec(n)
    if n <= BUILD_LIMIT:
        classical = build_classical_oracle(spec, sorted(spec.desired))
        polarity = count_gates(classical).total
        xconj = count_gates(to_closed_controls(classical)).total
    else:
        polarity, xconj = streamed_classical_counts(n)
    suppression = build_suppression_oracle(spec, enumerate_set="undesired")
    return GrowthRow(
        n=n,
        classical_formula=classical_formula(n),
        suppression_formula=suppression_formula(n),
        classical_measured_polarity=polarity,
        classical_measured_xconj=xconj,
        suppression_measured=count_gates(to_closed_controls(suppression)).total,
        suppression_measured_polarity=count_gates(suppression).total,
    )


def sweep(n_min: int = MIN_N, n_max: int = MAX_N) -> list[GrowthRow]:
    _check_n(n_min)
    _check_n(n_max)
    if n_min > n_max:
        raise InvalidArgumentError(f"n_min={n_min} exceeds n_max={n_max}")
    return [measure_oracles(n) for n in range(n_min, n_max + 1)]


def crossover(rows: list[GrowthRow]) -> int | None:
    """First n where the classical curve is strictly above the suppression curve."""
    for row in rows:
        if row.classical_formula > row.suppression_formula:
            return row.n
    return None


def rows_to_csv(rows: list[GrowthRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()
