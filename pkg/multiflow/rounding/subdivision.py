"""
Half-integral to integral rounding on an explicit unit subdivision.

Every supply edge e is replaced by max(c'(e), 1) parallel unit edges, where
c' is the capacity left after the integer part. The 1/2 paths are spread over
the copies (two per copy), uncrossed in the subdivided instance, and a stable
set of the resulting "share a unit edge" graph is routed at value 1.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from fractions import Fraction

import networkx as nx

from config.settings.solver_settings import SolverSettings
from multiflow.instance_io.model import (
    EdgeRole,
    EdgeSpec,
    Flow,
    Instance,
    SupplyPath,
    build_instance,
)
from multiflow.laminar import laminarize
from multiflow.plane_core import build_plane_graph
from multiflow.rounding.half_integer import FlowLike, refine_halves, split_integer_part
from multiflow.rounding.stable_set import stable_set
from utils.logging_utils import create_log_message


def subdivide(
    inst: Instance, copies: Mapping[int, int]
) -> tuple[Instance, dict[int, list[int]], dict[int, int]]:
    """
    Replaces supply edge e by `copies[e]` parallel unit-capacity edges.

    Copy 0 keeps the id of e; the others are appended. At the tail of e the
    copies follow e in the rotation, at the head they precede it in reverse,
    so consecutive copies bound digon faces.

    Returns:
        tuple: The subdivided instance, the copy ids per original edge and
            the original edge per copy id.
    """
    plane = inst.plane
    specs = list(inst.edge_specs())
    rotation = [list(order) for order in plane.rotation]
    bundle: dict[int, list[int]] = {}
    for edge in inst.supply_edges:
        u, v = plane.edges[edge]
        specs[edge] = EdgeSpec(u, v, EdgeRole.SUPPLY, 1)
        extra = list(range(len(specs), len(specs) + copies.get(edge, 1) - 1))
        specs.extend(EdgeSpec(u, v, EdgeRole.SUPPLY, 1) for _ in extra)
        at_u, at_v = rotation[u], rotation[v]
        position = at_u.index(edge)
        at_u[position + 1 : position + 1] = extra
        position = at_v.index(edge)
        at_v[position:position] = extra[::-1]
        bundle[edge] = [edge, *extra]

    original = {copy: edge for edge, ids in bundle.items() for copy in ids}
    # The far side of e now lies beyond its last copy.
    anchor = plane.faces[plane.outer_face][0]
    edge = anchor >> 1
    if anchor & 1 and edge in bundle:
        anchor = 2 * bundle[edge][-1] + 1
    traced = build_plane_graph(
        plane.vertex_count, [(spec.u, spec.v) for spec in specs], rotation
    )
    subdivided = build_instance(
        plane.vertex_count, specs, rotation, traced.face_of_dart(anchor)
    )
    return subdivided, bundle, original


def _project(path: SupplyPath, original: Mapping[int, int]) -> SupplyPath:
    return SupplyPath.canonical(
        path.demand, path.vertices, [original[edge] for edge in path.edges]
    )


def subdivided_integer_round(
    inst: Instance, hf: FlowLike, settings: SolverSettings | None = None
) -> Flow:
    """
    Rounds a feasible half-integral flow through the unit subdivision.

    Raises:
        TargetUnreachable: If the stable set in the subdivided instance still
            misses ceil(n/4).
    """
    settings = settings or SolverSettings()
    integer_part, split = refine_halves(inst, hf)
    copies = {edge: max(split.residual[edge], 1) for edge in inst.supply_edges}
    subdivided, bundle, original = subdivide(inst, copies)

    placed = []
    for position, path in enumerate(split.paths):
        edges = []
        for edge in path.edges:
            slot = next(
                number
                for number, members in enumerate(split.slots[edge])
                if position in members
            )
            edges.append(bundle[edge][slot])
        placed.append(
            (SupplyPath.canonical(path.demand, path.vertices, edges), Fraction(1, 2))
        )

    lf = laminarize(subdivided, Flow.from_items(placed), settings)
    whole, halves, _ = split_integer_part(subdivided, lf)
    conflicts = nx.Graph()
    conflicts.add_nodes_from(range(len(halves)))
    users: dict[int, list[int]] = {}
    for position, shore in enumerate(halves.shores):
        for edge in halves.paths[shore].edges:
            users.setdefault(edge, []).append(position)
    for members in users.values():
        conflicts.add_edges_from(
            (a, b) for i, a in enumerate(members) for b in members[i + 1 :]
        )

    chosen = stable_set(conflicts)
    selected = [
        (_project(halves.paths[halves.shores[position]], original), 1)
        for position in sorted(chosen)
    ]
    lifted = [(_project(path, original), value) for path, value in whole.values.items()]
    result = integer_part + Flow.from_items([*lifted, *selected])
    logging.info(
        create_log_message(
            "Rounded on unit subdivision",
            copies=sum(copies.values()),
            halves=len(halves),
            chosen=len(chosen),
            value=result.value,
        )
    )
    return result
