from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Union

import networkx as nx

from multiflow.plane_core import DualMap, PlaneGraph, build_plane_graph, dual

Number = Union[int, Fraction]


class EdgeRole(str, Enum):
    SUPPLY = "supply"
    DEMAND = "demand"


class EdgeSpec(NamedTuple):
    u: int
    v: int
    role: EdgeRole
    capacity: Optional[int] = None


@dataclass(frozen=True)
class Instance:
    """
    A supply graph G and a demand graph H embedded together in the plane.

    Edge ids are shared between `plane`, `roles` and `capacities`. Demand
    edges carry `None` as capacity.
    """

    plane: PlaneGraph
    roles: tuple[EdgeRole, ...]
    capacities: tuple[Optional[int], ...]

    @cached_property
    def dual(self) -> DualMap:
        return dual(self.plane)

    @cached_property
    def supply_edges(self) -> tuple[int, ...]:
        return tuple(
            edge for edge, role in enumerate(self.roles) if role is EdgeRole.SUPPLY
        )

    @cached_property
    def demand_edges(self) -> tuple[int, ...]:
        return tuple(
            edge for edge, role in enumerate(self.roles) if role is EdgeRole.DEMAND
        )

    @property
    def vertex_count(self) -> int:
        return self.plane.vertex_count

    def endpoints(self, edge: int) -> tuple[int, int]:
        return self.plane.edges[edge]

    def is_supply(self, edge: int) -> bool:
        return self.roles[edge] is EdgeRole.SUPPLY

    def is_demand(self, edge: int) -> bool:
        return self.roles[edge] is EdgeRole.DEMAND

    def capacity(self, edge: int) -> int:
        capacity = self.capacities[edge]
        if capacity is None:
            raise ValueError(f"edge {edge} is a demand edge and has no capacity")
        return capacity

    def total_capacity(self, edges: Iterable[int] | None = None) -> int:
        selected = self.supply_edges if edges is None else edges
        return sum(self.capacity(edge) for edge in selected)

    def edge_between(self, u: int, v: int, role: EdgeRole | None = None) -> int:
        """Smallest edge id joining `u` and `v`, optionally of a given role."""
        for edge, endpoints in enumerate(self.plane.edges):
            if set(endpoints) == {u, v} and (role is None or self.roles[edge] is role):
                return edge
        raise KeyError(f"no edge between {u} and {v}")

    def with_capacities(self, capacities: Mapping[int, int]) -> Instance:
        """
        The same embedding with some supply capacities replaced.

        Capacities must stay positive so that the embedding is unchanged.
        """
        updated = list(self.capacities)
        for edge, capacity in capacities.items():
            if not self.is_supply(edge):
                raise ValueError(f"edge {edge} is not a supply edge")
            if capacity < 1:
                raise ValueError("replacement capacities must be positive")
            updated[edge] = capacity
        return Instance(
            plane=self.plane, roles=self.roles, capacities=tuple(updated)
        )

    def edge_specs(self) -> tuple[EdgeSpec, ...]:
        return tuple(
            EdgeSpec(u, v, role, capacity)
            for (u, v), role, capacity in zip(
                self.plane.edges, self.roles, self.capacities
            )
        )


def build_instance(
    vertex_count: int,
    edges: Sequence[EdgeSpec],
    rotation: Sequence[Sequence[int]],
    outer_face: int = 0,
) -> Instance:
    """
    Builds an instance, deleting zero-capacity supply edges.

    A zero-capacity edge whose removal would disconnect G+H is kept: it lies
    on no circuit, so no supply path can use it.

    The embedding is validated as given first, so `outer_face` refers to the
    faces of the full edge list. After deletion, edges are renumbered in
    their original order and the outer face follows one of its surviving
    darts.

    Raises:
        ValueError: On negative capacities or capacities on demand edges.
        PlaneGraphError: If the embedding (before or after deletion) is
            rejected by `build_plane_graph`.
    """
    edges = [
        EdgeSpec(spec[0], spec[1], EdgeRole(spec[2]), *spec[3:]) for spec in edges
    ]
    for index, spec in enumerate(edges):
        if spec.role is EdgeRole.SUPPLY:
            if spec.capacity is None or spec.capacity < 0:
                raise ValueError(f"supply edge {index} needs a nonnegative capacity")
        elif spec.capacity is not None:
            raise ValueError(f"demand edge {index} cannot carry a capacity")

    plane = build_plane_graph(
        vertex_count, [(spec.u, spec.v) for spec in edges], rotation, outer_face
    )
    removable = _removable_zero_edges(vertex_count, edges)
    kept = [index for index in range(len(edges)) if index not in removable]
    if len(kept) < len(edges):
        plane = _delete_edges(plane, kept)
        edges = [edges[index] for index in kept]

    return Instance(
        plane=plane,
        roles=tuple(spec.role for spec in edges),
        capacities=tuple(spec.capacity for spec in edges),
    )


def _removable_zero_edges(vertex_count: int, edges: Sequence[EdgeSpec]) -> set[int]:
    """Zero-capacity edges, in id order, whose deletion keeps G+H connected."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(vertex_count))
    for index, spec in enumerate(edges):
        graph.add_edge(spec.u, spec.v, key=index)
    removable = set()
    for index, spec in enumerate(edges):
        if spec.capacity != 0:
            continue
        graph.remove_edge(spec.u, spec.v, key=index)
        if nx.has_path(graph, spec.u, spec.v):
            removable.add(index)
        else:
            graph.add_edge(spec.u, spec.v, key=index)
    return removable


def _delete_edges(plane: PlaneGraph, kept: Sequence[int]) -> PlaneGraph:
    renumber = {old: new for new, old in enumerate(kept)}
    rotation = [
        [renumber[edge] for edge in order if edge in renumber]
        for order in plane.rotation
    ]
    reduced = build_plane_graph(
        plane.vertex_count, [plane.edges[edge] for edge in kept], rotation
    )
    for dart in plane.faces[plane.outer_face]:
        if dart >> 1 in renumber:
            survivor = 2 * renumber[dart >> 1] + (dart & 1)
            return reduced.with_outer_face(reduced.face_of_dart(survivor))
    return reduced


@dataclass(frozen=True, order=True)
class SupplyPath:
    """
    A simple supply path serving one demand edge.

    Stored in canonical direction: `vertices` is the lexicographically smaller
    of the two traversal orders.
    """

    demand: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    @classmethod
    def canonical(
        cls, demand: int, vertices: Sequence[int], edges: Sequence[int]
    ) -> SupplyPath:
        forward = tuple(vertices)
        backward = forward[::-1]
        if backward < forward:
            return cls(demand=demand, vertices=backward, edges=tuple(edges)[::-1])
        return cls(demand=demand, vertices=forward, edges=tuple(edges))

    def __str__(self) -> str:
        return f"{self.demand}:" + "-".join(str(vertex) for vertex in self.vertices)


@dataclass(frozen=True)
class PathSet:
    """All enumerated supply paths, grouped by demand edge id."""

    by_demand: Mapping[int, tuple[SupplyPath, ...]]

    @property
    def paths(self) -> tuple[SupplyPath, ...]:
        return tuple(
            path
            for demand in sorted(self.by_demand)
            for path in self.by_demand[demand]
        )

    def __len__(self) -> int:
        return sum(len(paths) for paths in self.by_demand.values())


@dataclass(frozen=True)
class Flow:
    """
    Nonnegative rational values on supply paths.

    Zero entries are never stored. `certificate` optionally holds the LP dual
    price of every supply edge that proved the value optimal.
    """

    values: Mapping[SupplyPath, Fraction] = field(default_factory=dict)
    certificate: Optional[Mapping[int, Fraction]] = field(default=None, compare=False)

    @classmethod
    def from_items(
        cls,
        items: Iterable[tuple[SupplyPath, Number]],
        certificate: Optional[Mapping[int, Fraction]] = None,
    ) -> Flow:
        """Sums duplicate paths and drops zeros."""
        values: dict[SupplyPath, Fraction] = {}
        for path, amount in items:
            amount = Fraction(amount)
            if amount < 0:
                raise ValueError(f"negative flow {amount} on path {path}")
            values[path] = values.get(path, Fraction(0)) + amount
        return cls(
            values={path: amount for path, amount in sorted(values.items()) if amount},
            certificate=certificate,
        )

    @property
    def value(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    @property
    def paths(self) -> tuple[SupplyPath, ...]:
        return tuple(sorted(self.values))

    def is_integer(self) -> bool:
        return all(amount.denominator == 1 for amount in self.values.values())

    def is_half_integer(self) -> bool:
        return all(amount.denominator in (1, 2) for amount in self.values.values())

    def scaled(self, factor: Number) -> Flow:
        return Flow.from_items(
            (path, amount * factor) for path, amount in self.values.items()
        )

    def __add__(self, other: Flow) -> Flow:
        return Flow.from_items([*self.values.items(), *other.values.items()])

    def loads(self) -> dict[int, Fraction]:
        """Sum of path values per supply edge, for edges that carry flow."""
        loads: dict[int, Fraction] = {}
        for path, amount in self.values.items():
            for edge in path.edges:
                loads[edge] = loads.get(edge, Fraction(0)) + amount
        return loads
