from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import networkx as nx

from config.settings.solver_settings import SolverSettings
from multiflow.exact_lp import LinearProgram, solve_max
from multiflow.instance_io.model import Flow, Instance, PathSet, SupplyPath
from utils.logging_utils import create_log_message


class PathExplosion(RuntimeError):
    """Raised when path enumeration exceeds its cap."""


class UnknownPath(ValueError):
    """Raised when a flow path is not a simple supply path for its demand."""


class PathLP(NamedTuple):
    """The path LP: one column per path, one row per supply edge in `edges`."""

    lp: LinearProgram
    paths: tuple[SupplyPath, ...]
    edges: tuple[int, ...]


def enumerate_paths(
    inst: Instance, cap: int | None = None, settings: SolverSettings | None = None
) -> PathSet:
    """
    Lists every simple supply path of every demand edge.

    Args:
        inst (Instance): The instance.
        cap (int | None): Maximum total number of paths; defaults to
            `SolverSettings.path_cap`.
        settings (SolverSettings | None): Source of the default cap.

    Returns:
        PathSet: Paths in canonical direction, sorted per demand.

    Raises:
        PathExplosion: If more than `cap` paths exist.
    """
    if cap is None:
        cap = (settings or SolverSettings()).path_cap
    supply = inst.plane.to_networkx(inst.supply_edges)
    by_demand: dict[int, tuple[SupplyPath, ...]] = {}
    total = 0
    for demand in inst.demand_edges:
        source, target = inst.endpoints(demand)
        found = set()
        for steps in nx.all_simple_edge_paths(supply, source, target):
            vertices = [source, *(step[1] for step in steps)]
            edges = [step[2] for step in steps]
            found.add(SupplyPath.canonical(demand, vertices, edges))
            if total + len(found) > cap:
                raise PathExplosion(
                    f"more than {cap} supply paths; raise path_cap or shrink the instance"
                )
        total += len(found)
        by_demand[demand] = tuple(sorted(found))

    logging.info(
        create_log_message(
            "Enumerated supply paths", demands=len(inst.demand_edges), paths=total
        )
    )
    return PathSet(by_demand=by_demand)


def path_lp(
    inst: Instance, paths: PathSet, capacities: Optional[Mapping[int, int]] = None
) -> PathLP:
    """
    The LP `max sum f(P)` subject to edge loads within capacity.

    Only supply edges used by some path get a row. `capacities` overrides
    `inst` capacities edge by edge.
    """
    columns = paths.paths
    used = sorted({edge for path in columns for edge in path.edges})
    row_of = {edge: row for row, edge in enumerate(used)}
    supports: list[list[int]] = [[] for _ in used]
    for column, path in enumerate(columns):
        for edge in path.edges:
            supports[row_of[edge]].append(column)
    overrides = capacities or {}
    rhs = [overrides.get(edge, inst.capacity(edge)) for edge in used]
    lp = LinearProgram.from_index_sets(supports, rhs, len(columns))
    return PathLP(lp=lp, paths=columns, edges=tuple(used))


def max_multiflow(
    inst: Instance,
    paths: PathSet | None = None,
    settings: SolverSettings | None = None,
) -> Flow:
    """
    An exact maximum fractional multiflow over the given paths.

    The returned flow carries its certificate: the optimal dual price of
    every supply edge, whose capacity-weighted sum equals the flow value.
    """
    if paths is None:
        paths = enumerate_paths(inst, settings=settings)
    problem = path_lp(inst, paths)
    solution = solve_max(problem.lp)

    certificate = {edge: Fraction(0) for edge in inst.supply_edges}
    certificate.update(zip(problem.edges, solution.y))
    assert (
        sum(inst.capacity(edge) * price for edge, price in certificate.items())
        == solution.value
    ), "path LP dual does not certify its primal"

    flow = Flow.from_items(zip(problem.paths, solution.x), certificate=certificate)
    logging.info(
        create_log_message(
            "Solved fractional multiflow", value=flow.value, paths=len(flow.values)
        )
    )
    return flow


@dataclass(frozen=True)
class FeasibilityReport:
    """
    Edge loads of a flow against (possibly relaxed) capacities.

    Attributes:
        loads (dict): Load per supply edge, zero included.
        bounds (dict): Capacity plus slack per supply edge.
        violations (tuple): Overloaded edges in id order.
        max_loaded (tuple): Loaded edges with the largest load/capacity ratio.
    """

    loads: Mapping[int, Fraction]
    bounds: Mapping[int, int]
    violations: tuple[int, ...]
    max_loaded: tuple[int, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def witness(self) -> int | None:
        return self.violations[0] if self.violations else None


def validate_path(inst: Instance, path: SupplyPath) -> None:
    """
    Checks that `path` is a simple supply path joining its demand's endpoints.

    Raises:
        UnknownPath: Describing the first defect found.
    """
    if not 0 <= path.demand < len(inst.roles) or not inst.is_demand(path.demand):
        raise UnknownPath(f"path {path}: {path.demand} is not a demand edge")
    if len(path.edges) != len(path.vertices) - 1 or not path.edges:
        raise UnknownPath(f"path {path}: vertex and edge counts disagree")
    if len(set(path.vertices)) != len(path.vertices):
        raise UnknownPath(f"path {path} revisits a vertex")
    if {path.vertices[0], path.vertices[-1]} != set(inst.endpoints(path.demand)):
        raise UnknownPath(f"path {path} does not join the ends of its demand edge")
    for u, v, edge in zip(path.vertices, path.vertices[1:], path.edges):
        if not 0 <= edge < len(inst.roles) or not inst.is_supply(edge):
            raise UnknownPath(f"path {path}: {edge} is not a supply edge")
        if set(inst.endpoints(edge)) != {u, v}:
            raise UnknownPath(f"path {path}: edge {edge} does not join {u} and {v}")


def check_feasible(inst: Instance, f: Flow, slack: int = 0) -> FeasibilityReport:
    """
    Compares edge loads with `c(e) + slack`.

    Raises:
        UnknownPath: If some path of `f` is invalid for `inst`.
    """
    for path in f.paths:
        validate_path(inst, path)
    loads = {edge: Fraction(0) for edge in inst.supply_edges}
    loads.update(f.loads())
    bounds = {edge: inst.capacity(edge) + slack for edge in inst.supply_edges}
    violations = tuple(edge for edge in inst.supply_edges if loads[edge] > bounds[edge])

    ratios = {
        edge: loads[edge] / inst.capacity(edge)
        for edge in inst.supply_edges
        if loads[edge] > 0
    }
    peak = max(ratios.values(), default=None)
    max_loaded = tuple(edge for edge, ratio in sorted(ratios.items()) if ratio == peak)
    return FeasibilityReport(
        loads=loads, bounds=bounds, violations=violations, max_loaded=max_loaded
    )
