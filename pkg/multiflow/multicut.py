"""
Multicuts through their plane duals.

A supply edge set Q is a multicut exactly when its dual Q* is a 2-connector:
every demand dual edge lies on a circuit of Q* + F*. The primal-dual below
grows moats on the minimal sets S crossed by exactly one demand dual and no
edge of Q*, buys the first edge that goes tight, and finally drops redundant
edges in reverse order. The moat values give a feasible flow f with
c(Q) <= 2|f|.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from config.settings.solver_settings import SolverSettings
from multiflow.fractional_flow import check_feasible
from multiflow.instance_io.model import Flow, Instance, SupplyPath
from multiflow.plane_core import DualMap, NotACircuit, Shore, circuit_through, cut_edges
from utils.logging_utils import create_log_message


class NoPathInCut(RuntimeError):
    """Raised when a moat's cut holds no supply path for its demand."""


class MulticutInvariantError(RuntimeError):
    """Raised when a finished primal-dual run fails one of its guarantees."""


@dataclass(frozen=True)
class MulticutRun:
    """
    The outcome of `wgmv_multicut`.

    Attributes:
        multicut (frozenset): Supply edge ids of Q.
        additions (tuple): Edges in the order the growth phase bought them.
        y (dict): Moat value per canonical shore, positive entries only.
        flow (Flow): The flow extracted from `y`.
        supply_edges (tuple): All supply edge ids, the index set of `x`.
    """

    multicut: frozenset[int]
    additions: tuple[int, ...]
    y: Mapping[Shore, Fraction]
    flow: Flow
    supply_edges: tuple[int, ...]
    capacity: int

    @property
    def x(self) -> dict[int, int]:
        """Indicator of Q* over the supply dual edges."""
        return {edge: int(edge in self.multicut) for edge in self.supply_edges}

    @property
    def dual_value(self) -> Fraction:
        return sum(self.y.values(), Fraction(0))


def _demand_crossings(inst: Instance, dm: DualMap, faces: frozenset[int]) -> int:
    return sum(
        1
        for edge in inst.demand_edges
        if (dm.endpoints[edge][0] in faces) != (dm.endpoints[edge][1] in faces)
    )


def p_value(inst: Instance, dm: DualMap, s: Iterable[int]) -> int:
    """1 when exactly one demand dual edge leaves the face set `s`, else 0."""
    return int(_demand_crossings(inst, dm, frozenset(s)) == 1)


def _bridges(nodes: Iterable[int], edges: Iterable[tuple[int, int, int]]) -> set[int]:
    """Ids of the bridges of a multigraph given as `(id, a, b)` triples."""
    graph = nx.Graph()
    graph.add_nodes_from(nodes)
    ids: dict[frozenset[int], list[int]] = {}
    for edge, a, b in edges:
        if a == b:
            continue
        ids.setdefault(frozenset((a, b)), []).append(edge)
        graph.add_edge(a, b)
    return {
        ids[frozenset(pair)][0]
        for pair in nx.bridges(graph)
        if len(ids[frozenset(pair)]) == 1
    }


def is_2connector(inst: Instance, dm: DualMap, qstar: Iterable[int]) -> bool:
    """True when no demand dual edge is a bridge of (V*, Q* + F*)."""
    chosen = set(qstar) | set(inst.demand_edges)
    bridges = _bridges(
        range(dm.face_count), ((edge, *dm.endpoints[edge]) for edge in sorted(chosen))
    )
    return not bridges & set(inst.demand_edges)


def minimal_violated_sets(
    inst: Instance, dm: DualMap, qstar: Iterable[int]
) -> list[frozenset[int]]:
    """
    The inclusion-minimal face sets S with p(S) = 1 and no Q* edge leaving S.

    Components of (V*, Q*) are contracted; among the demand duals joining
    different components, the bridges cut the contracted graph into blocks,
    and the blocks touching exactly one bridge are the answer. The sets are
    pairwise disjoint and returned sorted.
    """
    bought = nx.Graph()
    bought.add_nodes_from(range(dm.face_count))
    bought.add_edges_from(dm.endpoints[edge] for edge in qstar)
    components = [frozenset(component) for component in nx.connected_components(bought)]
    owner = {face: index for index, component in enumerate(components) for face in component}

    contracted = []
    for edge in inst.demand_edges:
        a, b = (owner[face] for face in dm.endpoints[edge])
        if a != b:
            contracted.append((edge, a, b))
    bridges = _bridges(range(len(components)), contracted)
    if not bridges:
        return []

    blocks = nx.Graph()
    blocks.add_nodes_from(range(len(components)))
    blocks.add_edges_from((a, b) for edge, a, b in contracted if edge not in bridges)
    block_of = {}
    block_members = []
    for index, block in enumerate(nx.connected_components(blocks)):
        block_members.append(block)
        for node in block:
            block_of[node] = index
    incident = [0] * len(block_members)
    for edge, a, b in contracted:
        if edge in bridges:
            incident[block_of[a]] += 1
            incident[block_of[b]] += 1

    violated = [
        frozenset().union(*(components[node] for node in block))
        for block, count in zip(block_members, incident)
        if count == 1
    ]
    return sorted(violated, key=sorted)


def verify_multicut(inst: Instance, q: Iterable[int]) -> bool:
    """True when deleting `q` separates the ends of every demand edge."""
    removed = set(q)
    for edge in removed:
        if not inst.is_supply(edge):
            raise ValueError(f"edge {edge} is not a supply edge")
    components = nx.utils.UnionFind(range(inst.vertex_count))
    for edge in inst.supply_edges:
        if edge not in removed:
            components.union(*inst.endpoints(edge))
    return all(
        components[inst.endpoints(edge)[0]] != components[inst.endpoints(edge)[1]]
        for edge in inst.demand_edges
    )


def flow_from_dual(inst: Instance, dm: DualMap, y: Mapping[Shore, Fraction]) -> Flow:
    """
    Routes y(S) along a supply path inside each moat's cut.

    Raises:
        NoPathInCut: If a cut does not hold exactly one demand edge closed
            by a supply path.
    """
    items = []
    for shore, value in sorted(y.items()):
        if not value:
            continue
        cut = cut_edges(dm, shore)
        demands = [edge for edge in sorted(cut) if inst.is_demand(edge)]
        if len(demands) != 1:
            raise NoPathInCut(f"cut of {shore} holds {len(demands)} demand edges")
        try:
            vertices, edges = circuit_through(inst.plane, cut, demands[0])
        except NotACircuit as exc:
            raise NoPathInCut(f"cut of {shore} holds no supply path") from exc
        items.append((SupplyPath.canonical(demands[0], vertices, edges), value))
    return Flow.from_items(items)


def _grow(inst: Instance, dm: DualMap) -> tuple[list[int], dict[frozenset[int], Fraction]]:
    loads = {edge: Fraction(0) for edge in inst.supply_edges}
    y: dict[frozenset[int], Fraction] = {}
    qstar: list[int] = []
    while True:
        active = minimal_violated_sets(inst, dm, qstar)
        if not active:
            return qstar, y
        boundaries = [cut_edges(dm, Shore.of(faces)) for faces in active]
        counts: dict[int, int] = {}
        for boundary in boundaries:
            for edge in boundary:
                if inst.is_supply(edge) and edge not in qstar:
                    counts[edge] = counts.get(edge, 0) + 1
        if not counts:
            raise MulticutInvariantError("violated sets with no supply edge to buy")
        step, tight = min(
            ((inst.capacity(edge) - loads[edge]) / count, edge)
            for edge, count in counts.items()
        )
        if step:
            for faces, boundary in zip(active, boundaries):
                y[faces] = y.get(faces, Fraction(0)) + step
                for edge in boundary:
                    if edge in counts:
                        loads[edge] += step
        qstar.append(tight)
        logging.debug(
            create_log_message(
                "Moats grown", active=len(active), step=step, tight_edge=tight
            )
        )


def _check_run(inst: Instance, dm: DualMap, run: MulticutRun) -> None:
    if not verify_multicut(inst, run.multicut):
        raise MulticutInvariantError("Q does not separate every demand")
    if not is_2connector(inst, dm, run.multicut):
        raise MulticutInvariantError("Q* is not a 2-connector")
    loads: dict[int, Fraction] = {}
    for shore, value in run.y.items():
        if p_value(inst, dm, shore.faces) != 1:
            raise MulticutInvariantError(f"moat {shore} has p = 0")
        for edge in cut_edges(dm, shore):
            loads[edge] = loads.get(edge, Fraction(0)) + value
    for edge, load in loads.items():
        if inst.is_supply(edge) and load > inst.capacity(edge):
            raise MulticutInvariantError(f"moats overload dual edge {edge}")
    if run.capacity > 2 * run.dual_value:
        raise MulticutInvariantError(
            f"c(Q) = {run.capacity} exceeds twice the dual value {run.dual_value}"
        )
    if run.flow.value != run.dual_value:
        raise MulticutInvariantError("extracted flow value differs from the dual value")
    if not check_feasible(inst, run.flow).feasible:
        raise MulticutInvariantError("extracted flow is infeasible")


def wgmv_multicut(inst: Instance, settings: SolverSettings | None = None) -> MulticutRun:
    """
    A multicut Q with a certifying flow f such that c(Q) <= 2|f|.

    Growth phases raise y uniformly on all minimal violated sets by the
    largest exact step that keeps every supply dual edge within capacity,
    then buy the tight edge with the smallest id. Reverse delete then drops
    every bought edge whose removal keeps Q* a 2-connector.

    Raises:
        MulticutInvariantError: If `settings.verify_outputs` is set and the
            run breaks separation, dual feasibility, p = 1 on the support,
            the factor-two bound or the flow extraction.
    """
    settings = settings or SolverSettings()
    dm = inst.dual
    additions, raw_y = _grow(inst, dm)

    kept = set(additions)
    for edge in reversed(additions):
        if is_2connector(inst, dm, kept - {edge}):
            kept.remove(edge)

    y: dict[Shore, Fraction] = {}
    for faces, value in raw_y.items():
        shore = dm.canonical_shore(faces)
        y[shore] = y.get(shore, Fraction(0)) + value
    multicut = frozenset(kept)
    run = MulticutRun(
        multicut=multicut,
        additions=tuple(additions),
        y=dict(sorted(y.items())),
        flow=flow_from_dual(inst, dm, y),
        supply_edges=inst.supply_edges,
        capacity=inst.total_capacity(multicut),
    )
    if settings.verify_outputs:
        _check_run(inst, dm, run)
    logging.info(
        create_log_message(
            "Finished primal-dual multicut",
            multicut=multicut,
            capacity=run.capacity,
            dual_value=run.dual_value,
            phases=len(additions),
        )
    )
    return run
