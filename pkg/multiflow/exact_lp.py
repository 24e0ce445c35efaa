"""
Exact rational simplex for packing LPs.

Solves `max 1.x  s.t.  A x <= b, x >= 0` with `b >= 0`, so the all-slack basis
is feasible from the start. Arithmetic is `fractions.Fraction` throughout and
pivoting follows Bland's rule, which rules out cycling.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from utils.logging_utils import create_log_message

Scalar = Union[int, Fraction]


class Unbounded(ArithmeticError):
    """Raised when the objective grows without bound."""


@dataclass(frozen=True)
class LinearProgram:
    """
    A packing LP with all objective coefficients equal to one.

    Attributes:
        rows (tuple): Constraint matrix, one tuple per row.
        rhs (tuple): Right-hand side, nonnegative.
        variable_count (int): Number of structural variables.
    """

    rows: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    variable_count: int

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[Scalar]],
        rhs: Sequence[Scalar],
        variable_count: int | None = None,
    ) -> LinearProgram:
        """
        Builds an LP from a dense matrix.

        Raises:
            ValueError: On ragged rows, a row/rhs length mismatch or a
                negative right-hand side.
        """
        if len(rows) != len(rhs):
            raise ValueError(f"{len(rows)} rows but {len(rhs)} right-hand sides")
        if variable_count is None:
            variable_count = len(rows[0]) if rows else 0
        matrix = tuple(tuple(Fraction(entry) for entry in row) for row in rows)
        for index, row in enumerate(matrix):
            if len(row) != variable_count:
                raise ValueError(
                    f"row {index} has {len(row)} entries, expected {variable_count}"
                )
        bounds = tuple(Fraction(value) for value in rhs)
        if any(value < 0 for value in bounds):
            raise ValueError("right-hand sides must be nonnegative")
        return cls(rows=matrix, rhs=bounds, variable_count=variable_count)

    @classmethod
    def from_index_sets(
        cls,
        supports: Sequence[Iterable[int]],
        rhs: Sequence[Scalar],
        variable_count: int,
    ) -> LinearProgram:
        """A 0/1 LP whose row `i` has ones exactly on `supports[i]`."""
        rows = []
        for support in supports:
            row = [0] * variable_count
            for column in support:
                row[column] = 1
            rows.append(row)
        return cls.from_rows(rows, rhs, variable_count)

    @property
    def row_count(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class LPSolution:
    """
    A basic optimal solution with its dual.

    `value == sum(x) == rhs . y` holds exactly.
    """

    x: tuple[Fraction, ...]
    value: Fraction
    y: tuple[Fraction, ...]
    basis: tuple[int, ...]

    def is_integral(self) -> bool:
        return all(entry.denominator == 1 for entry in self.x)


def _pivot(
    tableau: list[list[Fraction]], objective: list[Fraction], row: int, column: int
) -> None:
    pivot_row = tableau[row]
    pivot = pivot_row[column]
    if pivot != 1:
        for index, entry in enumerate(pivot_row):
            if entry:
                pivot_row[index] = entry / pivot
    support = [index for index, entry in enumerate(pivot_row) if entry]
    for other in (*tableau[:row], *tableau[row + 1 :], objective):
        factor = other[column]
        if factor:
            for index in support:
                other[index] -= factor * pivot_row[index]


def solve_max(lp: LinearProgram) -> LPSolution:
    """
    Maximizes the sum of the variables.

    Entering column: the smallest index with a negative reduced cost.
    Leaving row: minimum ratio, ties broken by the smallest basic variable.

    Returns:
        LPSolution: The primal vertex, its value and the optimal dual.

    Raises:
        Unbounded: If some improving column has no positive entry.
    """
    n, m = lp.variable_count, lp.row_count
    width = n + m
    zero = Fraction(0)
    tableau = []
    for index, (row, bound) in enumerate(zip(lp.rows, lp.rhs)):
        slack = [zero] * m
        slack[index] = Fraction(1)
        tableau.append([*row, *slack, bound])
    objective = [Fraction(-1)] * n + [zero] * (m + 1)
    basis = list(range(n, width))

    pivots = 0
    while True:
        column = next((j for j in range(width) if objective[j] < 0), None)
        if column is None:
            break
        candidates = [
            (tableau[i][width] / tableau[i][column], basis[i], i)
            for i in range(m)
            if tableau[i][column] > 0
        ]
        if not candidates:
            raise Unbounded(f"column {column} improves the objective without bound")
        _, _, row = min(candidates)
        _pivot(tableau, objective, row, column)
        basis[row] = column
        pivots += 1

    x = [zero] * n
    for row, variable in enumerate(basis):
        if variable < n:
            x[variable] = tableau[row][width]
    logging.debug(
        create_log_message(
            "Solved LP", variables=n, rows=m, pivots=pivots, value=objective[width]
        )
    )
    return LPSolution(
        x=tuple(x),
        value=objective[width],
        y=tuple(objective[n:width]),
        basis=tuple(basis),
    )
