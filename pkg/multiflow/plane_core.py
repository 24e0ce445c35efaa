"""
Combinatorial plane graphs.

A plane graph is given by its edge list and a rotation system: for every
vertex, the cyclic order of its incident edges. Edge `e` owns two darts,
`2e` running from `edges[e][0]` to `edges[e][1]` and `2e + 1` running back.
Faces are the orbits of "reverse the dart, then step to the successor in the
rotation at its tail", numbered in the order they are discovered while
scanning darts by id.

Faces double as the vertices of the plane dual. A shore is a set of faces,
always stored as the side that avoids the outer face.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import networkx as nx


class PlaneGraphError(ValueError):
    """Base class for rejected plane graph input."""


class EulerViolation(PlaneGraphError):
    """Raised when face traversal contradicts V - E + F = 2."""


class Disconnected(PlaneGraphError):
    """Raised when the graph is not connected."""


class MalformedRotation(PlaneGraphError):
    """Raised when a rotation does not list every incident edge exactly once."""


class NotACircuit(PlaneGraphError):
    """Raised when an edge set is not a simple circuit."""


def reverse_dart(dart: int) -> int:
    return dart ^ 1


def dart_edge(dart: int) -> int:
    return dart >> 1


@dataclass(frozen=True)
class PlaneGraph:
    """
    A connected plane graph with its faces.

    Instances are built by `build_plane_graph`, which validates the rotation
    and computes `faces` and `dart_faces`.

    Attributes:
        vertex_count (int): Vertices are `0 .. vertex_count - 1`.
        edges (tuple): `(u, v)` per edge id.
        rotation (tuple): Per vertex, incident edge ids in cyclic order.
        outer_face (int): Index of the designated outer face.
        faces (tuple): Per face, its darts in traversal order.
        dart_faces (tuple): Face index per dart.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    rotation: tuple[tuple[int, ...], ...]
    outer_face: int
    faces: tuple[tuple[int, ...], ...] = field(repr=False)
    dart_faces: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def tail(self, dart: int) -> int:
        u, v = self.edges[dart >> 1]
        return v if dart & 1 else u

    def head(self, dart: int) -> int:
        return self.tail(dart ^ 1)

    def out_dart(self, vertex: int, edge: int) -> int:
        """The dart of `edge` that leaves `vertex`."""
        u, v = self.edges[edge]
        if u == vertex:
            return 2 * edge
        if v == vertex:
            return 2 * edge + 1
        raise ValueError(f"edge {edge} is not incident to vertex {vertex}")

    def face_of_dart(self, dart: int) -> int:
        return self.dart_faces[dart]

    def face_vertices(self, face: int) -> tuple[int, ...]:
        """Vertices met along the boundary walk of `face`."""
        return tuple(self.tail(dart) for dart in self.faces[face])

    def with_outer_face(self, outer_face: int) -> PlaneGraph:
        if not 0 <= outer_face < self.face_count:
            raise PlaneGraphError(f"outer face {outer_face} out of range")
        return replace(self, outer_face=outer_face)

    def to_networkx(self, edge_ids: Iterable[int] | None = None) -> nx.MultiGraph:
        """The (sub)graph on the given edge ids, keyed by edge id."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        selected = range(self.edge_count) if edge_ids is None else sorted(edge_ids)
        for edge in selected:
            u, v = self.edges[edge]
            graph.add_edge(u, v, key=edge)
        return graph


@dataclass(frozen=True, order=True)
class Shore:
    """
    A nonempty proper set of dual vertices (faces).

    Ordering and equality use `key`, the sorted tuple of faces, which is the
    canonical encoding used for deterministic tie-breaks.
    """

    key: tuple[int, ...]
    faces: frozenset[int] = field(compare=False, repr=False)

    @classmethod
    def of(cls, faces: Iterable[int]) -> Shore:
        members = frozenset(faces)
        return cls(key=tuple(sorted(members)), faces=members)

    def __contains__(self, face: object) -> bool:
        return face in self.faces

    def __len__(self) -> int:
        return len(self.key)

    def __str__(self) -> str:
        return "{" + ",".join(str(face) for face in self.key) + "}"


@dataclass(frozen=True)
class DualMap:
    """
    The plane dual of a `PlaneGraph`.

    Dual edge `e*` shares its id with primal edge `e` and joins the faces on
    the two sides of `e`: `endpoints[e] = (face of dart 2e, face of dart 2e+1)`.
    A primal bridge has both darts on one face, so its dual is a loop.

    Attributes:
        face_count (int): Number of dual vertices.
        outer_face (int): The primal outer face.
        endpoints (tuple): `(face, face)` per edge id.
        rotation (tuple): Per face, the edge ids along its boundary walk.
    """

    face_count: int
    outer_face: int
    endpoints: tuple[tuple[int, int], ...]
    rotation: tuple[tuple[int, ...], ...]

    def is_loop(self, edge: int) -> bool:
        left, right = self.endpoints[edge]
        return left == right

    def degree(self, face: int) -> int:
        return len(self.rotation[face])

    def canonical_shore(self, faces: Iterable[int]) -> Shore:
        """The shore of `faces` or of its complement, whichever avoids the outer face."""
        members = frozenset(faces)
        if not members or len(members) >= self.face_count:
            raise PlaneGraphError("a shore must be a nonempty proper set of faces")
        if self.outer_face in members:
            members = frozenset(range(self.face_count)) - members
        return Shore.of(members)

    def as_plane_graph(self) -> PlaneGraph:
        """
        The dual as a plane graph in its own right.

        Raises:
            MalformedRotation: If the dual has loops (the primal has bridges).
        """
        return build_plane_graph(
            self.face_count, self.endpoints, self.rotation, outer_face=0
        )


def _check_rotation(
    vertex_count: int,
    edges: Sequence[tuple[int, int]],
    rotation: Sequence[Sequence[int]],
) -> None:
    if len(rotation) != vertex_count:
        raise MalformedRotation(
            f"rotation lists {len(rotation)} vertices, expected {vertex_count}"
        )
    incident: list[list[int]] = [[] for _ in range(vertex_count)]
    for edge, (u, v) in enumerate(edges):
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise MalformedRotation(f"edge {edge} has an endpoint out of range")
        if u == v:
            raise MalformedRotation(f"edge {edge} is a loop")
        incident[u].append(edge)
        incident[v].append(edge)
    for vertex, order in enumerate(rotation):
        if sorted(order) != incident[vertex]:
            raise MalformedRotation(
                f"rotation at vertex {vertex} must list edges {incident[vertex]}"
                f" exactly once, got {list(order)}"
            )


def _trace_faces(
    edges: Sequence[tuple[int, int]], rotation: Sequence[Sequence[int]]
) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    position: dict[tuple[int, int], int] = {}
    for vertex, order in enumerate(rotation):
        for index, edge in enumerate(order):
            position[(vertex, edge)] = index

    def tail(dart: int) -> int:
        u, v = edges[dart >> 1]
        return v if dart & 1 else u

    def next_dart(dart: int) -> int:
        back = dart ^ 1
        vertex = tail(back)
        order = rotation[vertex]
        successor = order[(position[(vertex, dart >> 1)] + 1) % len(order)]
        u, _ = edges[successor]
        return 2 * successor if u == vertex else 2 * successor + 1

    dart_count = 2 * len(edges)
    dart_faces = [-1] * dart_count
    faces: list[tuple[int, ...]] = []
    for start in range(dart_count):
        if dart_faces[start] != -1:
            continue
        cycle = []
        dart = start
        while dart_faces[dart] == -1:
            dart_faces[dart] = len(faces)
            cycle.append(dart)
            dart = next_dart(dart)
        assert dart == start, "face traversal must close on its first dart"
        faces.append(tuple(cycle))
    if not faces:
        # A lone vertex still bounds one face.
        faces.append(())
    return tuple(faces), tuple(dart_faces)


def build_plane_graph(
    vertex_count: int,
    edges: Sequence[tuple[int, int]],
    rotation: Sequence[Sequence[int]],
    outer_face: int = 0,
) -> PlaneGraph:
    """
    Validates a rotation system and traces its faces.

    Args:
        vertex_count (int): Number of vertices.
        edges (Sequence[tuple[int, int]]): Endpoints per edge id.
        rotation (Sequence[Sequence[int]]): Incident edge ids per vertex, in
            cyclic order.
        outer_face (int): Index of the outer face in discovery order.

    Returns:
        PlaneGraph: The validated graph.

    Raises:
        MalformedRotation: Loops, bad endpoints, or a rotation that does not
            list each incident edge exactly once.
        Disconnected: The graph is not connected.
        EulerViolation: V - E + F != 2.
    """
    if vertex_count < 1:
        raise PlaneGraphError("a plane graph needs at least one vertex")
    edge_tuple = tuple((int(u), int(v)) for u, v in edges)
    rotation_tuple = tuple(tuple(int(edge) for edge in order) for order in rotation)
    _check_rotation(vertex_count, edge_tuple, rotation_tuple)

    graph = nx.MultiGraph()
    graph.add_nodes_from(range(vertex_count))
    graph.add_edges_from(edge_tuple)
    if not nx.is_connected(graph):
        raise Disconnected("the supply and demand edges must form a connected graph")

    faces, dart_faces = _trace_faces(edge_tuple, rotation_tuple)
    euler = vertex_count - len(edge_tuple) + len(faces)
    if euler != 2:
        raise EulerViolation(
            f"V - E + F = {vertex_count} - {len(edge_tuple)} + {len(faces)}"
            f" = {euler}, the rotation is not planar"
        )
    if not 0 <= outer_face < len(faces):
        raise PlaneGraphError(f"outer face {outer_face} out of range")
    return PlaneGraph(
        vertex_count=vertex_count,
        edges=edge_tuple,
        rotation=rotation_tuple,
        outer_face=outer_face,
        faces=faces,
        dart_faces=dart_faces,
    )


def dual(pg: PlaneGraph) -> DualMap:
    """Builds the plane dual of `pg`."""
    endpoints = tuple(
        (pg.dart_faces[2 * edge], pg.dart_faces[2 * edge + 1])
        for edge in range(pg.edge_count)
    )
    rotation = tuple(tuple(dart >> 1 for dart in face) for face in pg.faces)
    return DualMap(
        face_count=pg.face_count,
        outer_face=pg.outer_face,
        endpoints=endpoints,
        rotation=rotation,
    )


def cut_edges(dm: DualMap, s: Shore) -> frozenset[int]:
    """Dual edges with exactly one endpoint in `s`, i.e. delta(s)."""
    return frozenset(
        edge
        for edge, (left, right) in enumerate(dm.endpoints)
        if (left in s.faces) != (right in s.faces)
    )


def _check_circuit(pg: PlaneGraph, cycle: frozenset[int]) -> None:
    if not cycle:
        raise NotACircuit("an empty edge set is not a circuit")
    if any(not 0 <= edge < pg.edge_count for edge in cycle):
        raise NotACircuit("edge id out of range")
    graph = nx.MultiGraph()
    for edge in cycle:
        u, v = pg.edges[edge]
        graph.add_edge(u, v, key=edge)
    if any(degree != 2 for _, degree in graph.degree()):
        raise NotACircuit("every vertex of a circuit has degree two")
    if not nx.is_connected(graph):
        raise NotACircuit("the edge set splits into several cycles")


def shore_from_cycle(pg: PlaneGraph, dm: DualMap, cycle: Iterable[int]) -> Shore:
    """
    The faces enclosed by a simple circuit.

    Removing the circuit's dual edges splits the dual into exactly two
    components; the one without the outer face is returned.

    Raises:
        NotACircuit: If `cycle` is not a simple circuit of `pg`.
    """
    edges = frozenset(cycle)
    _check_circuit(pg, edges)
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(dm.face_count))
    graph.add_edges_from(
        endpoint
        for edge, endpoint in enumerate(dm.endpoints)
        if edge not in edges
    )
    outside = nx.node_connected_component(graph, dm.outer_face)
    inside = frozenset(range(dm.face_count)) - outside
    if not inside:
        raise NotACircuit("the edge set does not bound any face")
    return Shore.of(inside)


def circuit_through(
    pg: PlaneGraph, edge_set: Iterable[int], edge: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """
    A path inside `edge_set` that closes a circuit with `edge`.

    The path runs from `edges[edge][0]` to `edges[edge][1]`, uses only edges
    of `edge_set` other than `edge`, and is a shortest such path; among
    parallel edges the smallest id is taken.

    Returns:
        tuple: `(vertices, edges)` of the path.

    Raises:
        NotACircuit: If no such path exists.
    """
    others = sorted(set(edge_set) - {edge})
    graph = pg.to_networkx(others)
    source, target = pg.edges[edge]
    try:
        vertices = nx.shortest_path(graph, source, target)
    except nx.NetworkXNoPath as exc:
        raise NotACircuit(f"no path closes a circuit with edge {edge}") from exc
    path_edges = tuple(
        min(graph[u][v]) for u, v in zip(vertices, vertices[1:])
    )
    return tuple(vertices), path_edges
