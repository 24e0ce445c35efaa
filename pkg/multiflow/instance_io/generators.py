"""
Instance generators: the G_k ladder family, the (C4, 2K2) gadget and its
overline transform, and a random grid family for property tests.
"""

from __future__ import annotations

import logging
import math
import random
from collections.abc import Sequence
from fractions import Fraction
from typing import NamedTuple

from pydantic import ValidationError

from config.settings.fuzz_settings import FuzzSettings
from multiflow.instance_io.model import (
    EdgeRole,
    EdgeSpec,
    Flow,
    Instance,
    SupplyPath,
    build_instance,
)
from multiflow.plane_core import PlaneGraph, build_plane_graph
from utils.logging_utils import create_log_message


class BadParameter(ValueError):
    """Raised when a generator parameter is out of range."""


class GkReference(NamedTuple):
    fractional: Flow
    half_integer: Flow
    integer: Flow
    multicut: frozenset[int]


def _rotation_from_faces(
    vertex_count: int,
    edges: Sequence[tuple[int, int]],
    faces: Sequence[Sequence[int]],
) -> list[list[int]]:
    """
    Rotation system realizing the given oriented face boundaries.

    Faces are vertex cycles of a simple graph, oriented so that every edge is
    walked once in each direction. Consecutive steps x -> v -> w on a face
    make the edge vw the rotation successor of vx at v.
    """
    edge_ids = {frozenset(pair): edge for edge, pair in enumerate(edges)}
    successor: dict[tuple[int, int], int] = {}
    for face in faces:
        for index, vertex in enumerate(face):
            before = face[index - 1]
            after = face[(index + 1) % len(face)]
            successor[(vertex, edge_ids[frozenset((vertex, before))])] = edge_ids[
                frozenset((vertex, after))
            ]

    rotation = []
    for vertex in range(vertex_count):
        incident = [edge for edge, pair in enumerate(edges) if vertex in pair]
        order = [incident[0]]
        while True:
            following = successor[(vertex, order[-1])]
            if following == order[0]:
                break
            order.append(following)
        assert len(order) == len(incident), f"faces around {vertex} do not close"
        rotation.append(order)
    return rotation


def gk_vertex(k: int, side: str, i: int) -> int:
    """Vertex id of a_i (`side="a"`) or b_i (`side="b"`) in `gen_gk(k)`, 1-based i."""
    if not 1 <= i <= k:
        raise BadParameter(f"index {i} out of range 1..{k}")
    if side == "a":
        return i - 1
    if side == "b":
        return k + i - 1
    raise BadParameter(f"side must be 'a' or 'b', got {side!r}")


def gen_gk(k: int) -> Instance:
    """
    The ladder instance G_k.

    Supply edges (capacity 1): a_i b_i for i = 1..k (ids 0..k-1), then
    a_i a_{i+1} for i = 1..k-1. Demand edges: b_i b_{i+1} for i = 1..k-1,
    then b_i a_{i+2} for i = 1..k-2.

    The embedding nests the quadrilaterals a_i a_{i+1} a_{i+2} b_i inside
    each other; the outer face is a_1 a_2 a_3 b_1.

    Raises:
        BadParameter: If k < 3.
    """
    if k < 3:
        raise BadParameter(f"G_k needs k >= 3, got {k}")

    def a(i: int) -> int:
        return gk_vertex(k, "a", i)

    def b(i: int) -> int:
        return gk_vertex(k, "b", i)

    specs = [EdgeSpec(a(i), b(i), EdgeRole.SUPPLY, 1) for i in range(1, k + 1)]
    specs += [EdgeSpec(a(i), a(i + 1), EdgeRole.SUPPLY, 1) for i in range(1, k)]
    specs += [EdgeSpec(b(i), b(i + 1), EdgeRole.DEMAND) for i in range(1, k)]
    specs += [EdgeSpec(b(i), a(i + 2), EdgeRole.DEMAND) for i in range(1, k - 1)]

    outer = [a(1), a(2), a(3), b(1)]
    faces = [outer]
    for i in range(1, k - 2):
        faces.append([a(i + 1), a(i), b(i), b(i + 1)])
        faces.append([b(i + 1), b(i), a(i + 2), a(i + 3)])
    faces.append([a(k - 1), a(k - 2), b(k - 2), b(k - 1)])
    faces.append([a(k - 1), b(k - 1), b(k), a(k)])
    faces.append([a(k), b(k), b(k - 1), b(k - 2)])

    return _instance_from_faces(2 * k, specs, faces, outer_dart=(a(1), a(2)))


def _instance_from_faces(
    vertex_count: int,
    specs: Sequence[EdgeSpec],
    faces: Sequence[Sequence[int]],
    outer_dart: tuple[int, int],
) -> Instance:
    pairs = [(spec.u, spec.v) for spec in specs]
    rotation = _rotation_from_faces(vertex_count, pairs, faces)
    plane = build_plane_graph(vertex_count, pairs, rotation)
    tail, head = outer_dart
    edge = pairs.index((tail, head)) if (tail, head) in pairs else pairs.index((head, tail))
    outer_face = plane.face_of_dart(plane.out_dart(tail, edge))
    return build_instance(vertex_count, specs, rotation, outer_face)


def gk_reference_solutions(k: int) -> GkReference:
    """
    Known optimal objects of `gen_gk(k)`.

    The fractional flow puts 2/3 on the b_{k-1} b_k path and 1/3 on every other
    path (value 2(k-1)/3). The half-integral flow puts 1/2 on each b_i b_{i+1}
    path and on the b_1 a_3 path (value k/2). The integral flow routes
    b_1 b_2, b_3 b_4, ... (value floor(k/2)). The multicut is the path
    a_1 ... a_k (capacity k-1).
    """
    if k < 3:
        raise BadParameter(f"G_k needs k >= 3, got {k}")

    def a(i: int) -> int:
        return gk_vertex(k, "a", i)

    def b(i: int) -> int:
        return gk_vertex(k, "b", i)

    def rung(i: int) -> int:
        return i - 1

    def rail(i: int) -> int:
        return k + i - 1

    def pair_path(i: int) -> SupplyPath:
        return SupplyPath.canonical(
            2 * k + i - 2,
            (b(i), a(i), a(i + 1), b(i + 1)),
            (rung(i), rail(i), rung(i + 1)),
        )

    def diagonal_path(i: int) -> SupplyPath:
        return SupplyPath.canonical(
            3 * k + i - 3,
            (b(i), a(i), a(i + 1), a(i + 2)),
            (rung(i), rail(i), rail(i + 1)),
        )

    third = Fraction(1, 3)
    fractional = Flow.from_items(
        [(pair_path(i), third) for i in range(1, k - 1)]
        + [(pair_path(k - 1), 2 * third)]
        + [(diagonal_path(i), third) for i in range(1, k - 1)]
    )
    half = Fraction(1, 2)
    half_integer = Flow.from_items(
        [(pair_path(i), half) for i in range(1, k)] + [(diagonal_path(1), half)]
    )
    integer = Flow.from_items((pair_path(i), 1) for i in range(1, k, 2))
    multicut = frozenset(rail(i) for i in range(1, k))
    return GkReference(fractional, half_integer, integer, multicut)


def c4_2k2_instance() -> Instance:
    """
    The 4-cycle 0-1-2-3 with unit capacities and both diagonals as demands.

    Supply edges 0..3 are 01, 12, 23, 30; demand 4 is 02 (drawn inside the
    cycle) and demand 5 is 13 (drawn outside). G+H is K4.
    """
    specs = [
        EdgeSpec(0, 1, EdgeRole.SUPPLY, 1),
        EdgeSpec(1, 2, EdgeRole.SUPPLY, 1),
        EdgeSpec(2, 3, EdgeRole.SUPPLY, 1),
        EdgeSpec(3, 0, EdgeRole.SUPPLY, 1),
        EdgeSpec(0, 2, EdgeRole.DEMAND),
        EdgeSpec(1, 3, EdgeRole.DEMAND),
    ]
    faces = [[0, 1, 2], [1, 0, 3], [3, 0, 2], [1, 3, 2]]
    return _instance_from_faces(4, specs, faces, outer_dart=(1, 0))


def overline(inst: Instance) -> Instance:
    """
    Puts a unit-capacity supply edge in series with every demand edge.

    Demand uv (id e) becomes demand u w (same id e) for a new vertex w, and a
    new supply edge w v of capacity 1 takes the place of e in the rotation at
    v. New vertices and edges are numbered in demand id order.
    """
    if not inst.demand_edges:
        return inst

    plane = inst.plane
    specs = list(inst.edge_specs())
    rotation = [list(order) for order in plane.rotation]
    vertex_count = plane.vertex_count
    for demand in inst.demand_edges:
        u, v = plane.edges[demand]
        middle = vertex_count
        vertex_count += 1
        specs[demand] = EdgeSpec(u, middle, EdgeRole.DEMAND)
        series = len(specs)
        specs.append(EdgeSpec(middle, v, EdgeRole.SUPPLY, 1))
        at_v = rotation[v]
        at_v[at_v.index(demand)] = series
        rotation.append([demand, series])

    pairs = [(spec.u, spec.v) for spec in specs]
    subdivided = build_plane_graph(vertex_count, pairs, rotation)
    # Old darts keep their ids and their faces.
    outer_face = subdivided.face_of_dart(plane.faces[plane.outer_face][0])
    return build_instance(vertex_count, specs, rotation, outer_face)


def gen_c4_2k2_overline() -> Instance:
    return overline(c4_2k2_instance())


def _signed_area(plane: PlaneGraph, face: int, coords: Sequence[tuple[int, int]]) -> int:
    """Twice the signed area enclosed by a face walk."""
    walk = plane.face_vertices(face)
    total = 0
    for index, vertex in enumerate(walk):
        x1, y1 = coords[vertex]
        x2, y2 = coords[walk[(index + 1) % len(walk)]]
        total += x1 * y2 - x2 * y1
    return total


def _grid_supply(
    width: int, height: int, keep_probability: float, rng: random.Random
) -> list[tuple[int, int]]:
    def vertex(x: int, y: int) -> int:
        return y * width + x

    neighbours: dict[int, list[int]] = {v: [] for v in range(width * height)}
    grid_edges = []
    for y in range(height):
        for x in range(width):
            if x + 1 < width:
                grid_edges.append((vertex(x, y), vertex(x + 1, y)))
            if y + 1 < height:
                grid_edges.append((vertex(x, y), vertex(x, y + 1)))
    for u, v in grid_edges:
        neighbours[u].append(v)
        neighbours[v].append(u)

    # Random depth-first spanning tree keeps the supply graph connected.
    tree: set[frozenset[int]] = set()
    visited = {0}
    stack = [0]
    while stack:
        current = stack[-1]
        fresh = [v for v in neighbours[current] if v not in visited]
        if not fresh:
            stack.pop()
            continue
        chosen = rng.choice(fresh)
        visited.add(chosen)
        tree.add(frozenset((current, chosen)))
        stack.append(chosen)

    return [
        edge
        for edge in grid_edges
        if frozenset(edge) in tree or rng.random() < keep_probability
    ]


def gen_fuzz(
    seed: int,
    width: int = 3,
    height: int = 3,
    demands: int = 3,
    max_capacity: int = 2,
    keep_probability: float = 0.6,
) -> Instance:
    """
    A random connected grid subgraph with demand chords drawn inside faces.

    Supply edges get capacities in 1..max_capacity. Each demand joins two
    distinct vertices on the boundary of a randomly chosen face and is
    spliced into the rotation so that it splits that face. The same seed
    always yields the same instance.

    Raises:
        BadParameter: If the parameters fail `FuzzSettings` validation.
    """
    try:
        settings = FuzzSettings(
            width=width,
            height=height,
            demands=demands,
            max_capacity=max_capacity,
            keep_probability=keep_probability,
        )
    except ValidationError as exc:
        raise BadParameter(str(exc)) from exc

    rng = random.Random(seed)
    coords = [(x, y) for y in range(settings.height) for x in range(settings.width)]
    supply = _grid_supply(settings.width, settings.height, settings.keep_probability, rng)
    specs = [
        EdgeSpec(u, v, EdgeRole.SUPPLY, rng.randint(1, settings.max_capacity))
        for u, v in supply
    ]
    pairs = [(spec.u, spec.v) for spec in specs]
    rotation: list[list[int]] = []
    for vertex, (x, y) in enumerate(coords):
        incident = [edge for edge, pair in enumerate(pairs) if vertex in pair]

        def angle(edge: int, x: int = x, y: int = y, vertex: int = vertex) -> float:
            u, v = pairs[edge]
            ox, oy = coords[v if u == vertex else u]
            return math.atan2(oy - y, ox - x)

        rotation.append(sorted(incident, key=angle))

    plane = build_plane_graph(len(coords), pairs, rotation)
    # Inner faces wind counterclockwise, so the outer face has negative area.
    outer_face = min(
        range(plane.face_count), key=lambda face: (_signed_area(plane, face, coords), face)
    )
    plane = plane.with_outer_face(outer_face)

    for _ in range(settings.demands):
        candidates = [
            face
            for face in range(plane.face_count)
            if len(set(plane.face_vertices(face))) >= 2
        ]
        face = rng.choice(candidates)
        darts = plane.faces[face]
        walk = plane.face_vertices(face)
        positions = [
            (i, j)
            for i in range(len(walk))
            for j in range(i + 1, len(walk))
            if walk[i] != walk[j]
        ]
        i, j = rng.choice(positions)
        chord = len(pairs)
        pairs.append((walk[i], walk[j]))
        specs.append(EdgeSpec(walk[i], walk[j], EdgeRole.DEMAND))
        for position in (i, j):
            order = rotation[walk[position]]
            order.insert(order.index(darts[position] >> 1), chord)
        anchor = plane.faces[plane.outer_face][0]
        plane = build_plane_graph(len(coords), pairs, rotation)
        plane = plane.with_outer_face(plane.face_of_dart(anchor))

    inst = build_instance(len(coords), specs, rotation, plane.outer_face)
    logging.debug(
        create_log_message(
            "Generated fuzz instance",
            seed=seed,
            vertices=inst.vertex_count,
            supply=len(inst.supply_edges),
            demands=len(inst.demand_edges),
        )
    )
    return inst
