"""
Chain LPs: `max sum x_L` where every row bounds the sum of x over one chain
of a laminar family. The coefficient matrix is a network matrix, so integer
bounds give integer optima, which the greedy below finds directly.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from multiflow.exact_lp import LinearProgram, solve_max
from multiflow.instance_io.model import Instance
from multiflow.laminar import LaminarFlow, chain
from multiflow.plane_core import Shore
from utils.logging_utils import create_log_message


class ChainLPMismatch(RuntimeError):
    """Raised when the greedy and the simplex disagree on a chain LP."""


class ChainRow(NamedTuple):
    """
    One constraint: `sum(x[members]) <= bound`.

    `edge` and `faces` record the supply edge and dual orientation (u, v)
    the row was built from; `members` index the columns, innermost first.
    """

    edge: int
    faces: tuple[int, int]
    members: tuple[int, ...]
    bound: int


@dataclass(frozen=True)
class ChainLP:
    shores: tuple[Shore, ...]
    rows: tuple[ChainRow, ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(shore) for shore in self.shores)

    def as_linear_program(self) -> LinearProgram:
        return LinearProgram.from_index_sets(
            [row.members for row in self.rows],
            [row.bound for row in self.rows],
            len(self.shores),
        )


@dataclass(frozen=True)
class ChainSolution:
    x: tuple[int, ...]
    y: tuple[int, ...]

    @property
    def value(self) -> int:
        return sum(self.x)


def build_chain_lp(
    inst: Instance,
    lf: LaminarFlow,
    bound: Callable[[int, tuple[Shore, ...]], int],
) -> ChainLP:
    """
    One row per supply edge e and orientation (u, v) of its dual edge.

    The row holds the chain of shores containing u but not v and gets the
    bound `bound(e, chain)`. Empty chains and dual loops give no row.
    """
    dm = inst.dual
    column = {shore: index for index, shore in enumerate(lf.shores)}
    rows = []
    for edge in inst.supply_edges:
        if dm.is_loop(edge):
            continue
        u, v = dm.endpoints[edge]
        for faces in ((u, v), (v, u)):
            members = chain(lf, *faces)
            if members:
                rows.append(
                    ChainRow(
                        edge=edge,
                        faces=faces,
                        members=tuple(column[shore] for shore in members),
                        bound=bound(edge, members),
                    )
                )
    return ChainLP(shores=lf.shores, rows=tuple(rows))


def _greedy(
    sizes: Sequence[int], rows: Sequence[Sequence[int]], bounds: Sequence[int]
) -> ChainSolution:
    columns = len(sizes)
    x = [0] * columns
    residual = list(bounds)
    rows_of: list[list[int]] = [[] for _ in range(columns)]
    for index, members in enumerate(rows):
        for member in members:
            rows_of[member].append(index)

    active_columns = set(range(columns))
    active_rows = set(range(len(rows)))
    picks: list[tuple[int, int]] = []
    while active_columns:
        smallest = min(active_columns, key=lambda member: (sizes[member], member))
        touching = [index for index in rows_of[smallest] if index in active_rows]
        if not touching:
            raise ValueError(f"column {smallest} is not bounded by any row")
        tight = min(touching, key=lambda index: (residual[index], index))
        amount = residual[tight]
        x[smallest] = amount
        for index in touching:
            residual[index] -= amount
        active_rows.discard(tight)
        active_columns.difference_update(rows[tight])
        picks.append((tight, smallest))

    y = [0] * len(rows)
    covered: set[int] = set()
    for tight, member in reversed(picks):
        if member not in covered:
            y[tight] = 1
            covered.update(rows[tight])
    return ChainSolution(x=tuple(x), y=tuple(y))


def greedy_chain_lp(clp: ChainLP, cross_check: bool = False) -> ChainSolution:
    """
    Integral primal and dual optima of a chain LP.

    Primal: take the smallest remaining shore, raise it until the row with the
    least slack among those containing it is tight, then retire that row and
    every shore in it. Dual: walk the retired rows backwards and price each
    one whose shore is still uncovered.

    Raises:
        ChainLPMismatch: If the dual does not certify the primal, or, with
            `cross_check`, if the exact simplex finds a different value.
    """
    solution = _greedy(
        clp.sizes, [row.members for row in clp.rows], [row.bound for row in clp.rows]
    )
    dual_value = sum(weight * row.bound for weight, row in zip(solution.y, clp.rows))
    if dual_value != solution.value:
        raise ChainLPMismatch(
            f"greedy primal {solution.value} and dual {dual_value} differ"
        )
    if cross_check:
        exact = solve_max(clp.as_linear_program())
        if exact.value != Fraction(solution.value):
            raise ChainLPMismatch(
                f"greedy value {solution.value} but simplex value {exact.value}"
            )
    logging.debug(
        create_log_message(
            "Solved chain LP",
            columns=len(clp.shores),
            rows=len(clp.rows),
            value=solution.value,
        )
    )
    return solution
