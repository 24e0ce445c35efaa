"""
Laminar flows.

A path P of demand e_P closes the circuit P + e_P, whose faces on the inner
side form a shore L with delta(L) = (P + e_P)*. A flow is laminar when the
shores of its paths are pairwise nested or disjoint. `uncross` turns any
weighted family of such shores into a laminar one without raising the load
of any dual edge.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from config.settings.solver_settings import SolverSettings
from multiflow.instance_io.model import Flow, Instance, SupplyPath
from multiflow.plane_core import (
    DualMap,
    Shore,
    circuit_through,
    cut_edges,
    shore_from_cycle,
)
from utils.logging_utils import create_log_message


class UncrossingError(RuntimeError):
    """Raised when uncrossing meets an inadmissible pair or exceeds its budget."""


@dataclass(frozen=True)
class LaminarFlow:
    """
    A laminar family of shores with positive values.

    Attributes:
        entries (tuple): `(shore, value)` pairs sorted by shore.
        paths (dict): The supply path whose circuit bounds each shore.
        face_count (int): Number of dual vertices the shores live in.
    """

    entries: tuple[tuple[Shore, Fraction], ...]
    paths: Mapping[Shore, SupplyPath]
    face_count: int

    @property
    def shores(self) -> tuple[Shore, ...]:
        return tuple(shore for shore, _ in self.entries)

    @property
    def weights(self) -> dict[Shore, Fraction]:
        return dict(self.entries)

    @property
    def value(self) -> Fraction:
        return sum((value for _, value in self.entries), Fraction(0))

    def __len__(self) -> int:
        return len(self.entries)

    def to_flow(self) -> Flow:
        return Flow.from_items((self.paths[shore], value) for shore, value in self.entries)


def crosses(a: Shore, b: Shore) -> bool:
    """Two canonical shores cross when they meet and neither contains the other."""
    common = a.faces & b.faces
    return bool(common) and common != a.faces and common != b.faces


def is_laminar(shores: Iterable[Shore]) -> bool:
    return not any(crosses(a, b) for a, b in combinations(shores, 2))


def demand_duals(inst: Instance, dm: DualMap, shore: Shore) -> frozenset[int]:
    """Demand edges whose duals lie in delta(shore)."""
    return frozenset(edge for edge in cut_edges(dm, shore) if inst.is_demand(edge))


def cut_loads(inst: Instance, family: Mapping[Shore, Fraction]) -> dict[int, Fraction]:
    """Total weight of the shores whose cut contains each dual edge."""
    dm = inst.dual
    loads: dict[int, Fraction] = {}
    for shore, weight in family.items():
        for edge in cut_edges(dm, shore):
            loads[edge] = loads.get(edge, Fraction(0)) + weight
    return loads


def flow_to_shores(inst: Instance, f: Flow) -> dict[Shore, Fraction]:
    """
    Maps every path of `f` to the shore its circuit encloses.

    Raises:
        NotACircuit: If some path plus its demand edge is not a circuit.
    """
    dm = inst.dual
    family: dict[Shore, Fraction] = {}
    for path, value in f.values.items():
        shore = shore_from_cycle(inst.plane, dm, {*path.edges, path.demand})
        family[shore] = family.get(shore, Fraction(0)) + value
    return family


def _crossing_pairs(shores: list[Shore]) -> list[tuple[Shore, Shore]]:
    return [(a, b) for a, b in combinations(shores, 2) if crosses(a, b)]


class _Uncrosser:
    def __init__(self, inst: Instance, budget: int):
        self.inst = inst
        self.dm = inst.dual
        self.budget = budget
        self.steps = 0

    def single_demand(self, faces: frozenset[int]) -> bool:
        return len(demand_duals(self.inst, self.dm, Shore.of(faces))) == 1

    def measure(self, weights: dict[Shore, Fraction]) -> Fraction:
        """Sum of f_S |S| (F - |S|); each uncrossing step lowers it."""
        count = self.dm.face_count
        return sum(
            (value * len(shore) * (count - len(shore)) for shore, value in weights.items()),
            Fraction(0),
        )

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise UncrossingError(f"uncrossing did not settle within {self.budget} steps")

    def uncross_pairs(self, weights: dict[Shore, Fraction]) -> None:
        while True:
            pairs = _crossing_pairs(sorted(weights))
            if not pairs:
                return
            self.tick()
            before = self.measure(weights)
            a, b = pairs[0]
            amount = min(weights[a], weights[b])
            inner, outer = a.faces & b.faces, a.faces | b.faces
            if self.single_demand(inner) and self.single_demand(outer):
                replacement = (inner, outer)
            elif self.single_demand(a.faces - b.faces) and self.single_demand(
                b.faces - a.faces
            ):
                replacement = (a.faces - b.faces, b.faces - a.faces)
            else:
                raise UncrossingError(f"no admissible replacement for {a} and {b}")

            for shore in (a, b):
                weights[shore] -= amount
                if not weights[shore]:
                    del weights[shore]
            for faces in replacement:
                shore = Shore.of(faces)
                weights[shore] = weights.get(shore, Fraction(0)) + amount
            after = self.measure(weights)
            if after >= before:
                raise UncrossingError(
                    f"crossing measure did not decrease at step {self.steps}"
                )
            logging.debug(
                create_log_message(
                    "Uncrossed shores",
                    step=self.steps,
                    first=a,
                    second=b,
                    amount=amount,
                    crossing_pairs=len(pairs),
                    measure_before=before,
                    measure_after=after,
                )
            )

    def minimal_shore(self, shore: Shore) -> Shore:
        """Shrinks `shore` to the circuit through its demand edge."""
        cut = cut_edges(self.dm, shore)
        (demand,) = demand_duals(self.inst, self.dm, shore)
        _, path_edges = circuit_through(self.inst.plane, cut, demand)
        if len(path_edges) + 1 == len(cut):
            return shore
        return shore_from_cycle(self.inst.plane, self.dm, {*path_edges, demand})

    def minimalize(self, weights: dict[Shore, Fraction]) -> bool:
        changed = False
        for shore in sorted(weights):
            smaller = self.minimal_shore(shore)
            if smaller != shore:
                self.tick()
                changed = True
                value = weights.pop(shore)
                weights[smaller] = weights.get(smaller, Fraction(0)) + value
        return changed


def uncross(
    inst: Instance,
    family: Mapping[Shore, Fraction],
    settings: SolverSettings | None = None,
) -> LaminarFlow:
    """
    Makes a weighted shore family laminar.

    The lexicographically smallest crossing pair (A, B) is replaced, with
    weight min(f_A, f_B), by (A & B, A | B) when both cuts keep exactly one
    demand dual edge, otherwise by (A - B, B - A). Afterwards every shore is
    shrunk to the circuit through its demand edge; the two steps repeat until
    neither changes anything.

    Args:
        inst (Instance): The instance the shores live in.
        family (Mapping[Shore, Fraction]): Canonical shores with weights;
            every cut must hold exactly one demand dual edge.
        settings (SolverSettings | None): Supplies the step budget factor.

    Returns:
        LaminarFlow: The laminar family with its supply paths.

    Raises:
        UncrossingError: On input with a cut of the wrong demand count, an
            inadmissible pair, a step that fails to lower the crossing
            measure, or when the step budget runs out.
    """
    settings = settings or SolverSettings()
    dm = inst.dual
    weights = {shore: Fraction(value) for shore, value in family.items() if value}
    for shore in weights:
        if len(demand_duals(inst, dm, shore)) != 1:
            raise UncrossingError(f"cut of shore {shore} must hold exactly one demand")
    total = sum(weights.values(), Fraction(0))

    budget = settings.uncross_budget_factor * dm.face_count**2 * max(1, len(weights))
    worker = _Uncrosser(inst, budget)
    while True:
        worker.uncross_pairs(weights)
        if not worker.minimalize(weights):
            break

    shores = sorted(weights)
    assert sum(weights.values(), Fraction(0)) == total, "uncrossing changed the value"
    assert is_laminar(shores), "uncrossing left a crossing pair"
    assert len(shores) <= 2 * (dm.face_count - 1), "laminar family is too large"

    paths = {}
    for shore in shores:
        (demand,) = demand_duals(inst, dm, shore)
        vertices, edges = circuit_through(inst.plane, cut_edges(dm, shore), demand)
        paths[shore] = SupplyPath.canonical(demand, vertices, edges)

    logging.info(
        create_log_message(
            "Uncrossed shore family",
            shores=len(shores),
            steps=worker.steps,
            value=total,
        )
    )
    return LaminarFlow(
        entries=tuple((shore, weights[shore]) for shore in shores),
        paths=paths,
        face_count=dm.face_count,
    )


def laminarize(
    inst: Instance, f: Flow, settings: SolverSettings | None = None
) -> LaminarFlow:
    """A laminar flow of the same value whose edge loads never exceed those of `f`."""
    return uncross(inst, flow_to_shores(inst, f), settings)


def chain(lf: LaminarFlow, u: int, v: int) -> tuple[Shore, ...]:
    """The shores holding face `u` but not face `v`, innermost first."""
    if u == v:
        raise ValueError("a chain needs two distinct faces")
    members = [shore for shore in lf.shores if u in shore and v not in shore]
    return tuple(sorted(members, key=lambda shore: (len(shore), shore.key)))
