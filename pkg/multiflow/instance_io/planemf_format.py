"""
The planemf v1 text format and the JSON encoding of flows.

    planemf 1
    vertices <n>
    edge <u> <v> supply <c>
    edge <u> <v> demand
    rotation <v> <edge-id> ...
    outer <face-index>

Edge ids follow file order. `#` starts a comment; blank lines are ignored.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from typing import Any

from multiflow.instance_io.model import (
    EdgeRole,
    EdgeSpec,
    Flow,
    Instance,
    SupplyPath,
    build_instance,
)

HEADER = ("planemf", "1")


class InstanceSyntaxError(SyntaxError):
    """Raised when planemf text cannot be parsed; carries the offending line."""

    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
        self.detail = message


def _to_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError as exc:
        raise InstanceSyntaxError(f"{what} must be an integer, got {token!r}", lineno) from exc


def parse(text: str) -> Instance:
    """
    Parses planemf text into an instance.

    Raises:
        InstanceSyntaxError: Malformed lines, with their line number.
        PlaneGraphError: Semantic embedding errors from `build_plane_graph`.
    """
    header_seen = False
    vertex_count: int | None = None
    edges: list[EdgeSpec] = []
    rotation: dict[int, list[int]] = {}
    outer_face: int | None = None
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if not header_seen:
            if tuple(tokens) != HEADER:
                raise InstanceSyntaxError("expected header 'planemf 1'", lineno)
            header_seen = True
            continue

        keyword, args = tokens[0], tokens[1:]
        if keyword == "vertices":
            if vertex_count is not None:
                raise InstanceSyntaxError("duplicate 'vertices' line", lineno)
            if len(args) != 1:
                raise InstanceSyntaxError("usage: vertices <n>", lineno)
            vertex_count = _to_int(args[0], "vertex count", lineno)
            if vertex_count < 1:
                raise InstanceSyntaxError("vertex count must be positive", lineno)
        elif keyword == "edge":
            edges.append(_parse_edge(args, vertex_count, lineno))
        elif keyword == "rotation":
            if vertex_count is None:
                raise InstanceSyntaxError("'vertices' must precede 'rotation'", lineno)
            if not args:
                raise InstanceSyntaxError("usage: rotation <v> <edge-id>...", lineno)
            vertex = _to_int(args[0], "vertex", lineno)
            if not 0 <= vertex < vertex_count:
                raise InstanceSyntaxError(f"vertex {vertex} out of range", lineno)
            if vertex in rotation:
                raise InstanceSyntaxError(f"duplicate rotation for vertex {vertex}", lineno)
            order = [_to_int(token, "edge id", lineno) for token in args[1:]]
            for edge in order:
                if not 0 <= edge < len(edges):
                    raise InstanceSyntaxError(f"unknown edge id {edge}", lineno)
            rotation[vertex] = order
        elif keyword == "outer":
            if outer_face is not None:
                raise InstanceSyntaxError("duplicate 'outer' line", lineno)
            if len(args) != 1:
                raise InstanceSyntaxError("usage: outer <face-index>", lineno)
            outer_face = _to_int(args[0], "outer face", lineno)
        else:
            raise InstanceSyntaxError(f"unknown keyword {keyword!r}", lineno)

    if not header_seen:
        raise InstanceSyntaxError("expected header 'planemf 1'", max(last_line, 1))
    if vertex_count is None:
        raise InstanceSyntaxError("missing 'vertices' line", last_line)
    if outer_face is None:
        raise InstanceSyntaxError("missing 'outer' line", last_line)

    return build_instance(
        vertex_count,
        edges,
        [rotation.get(vertex, []) for vertex in range(vertex_count)],
        outer_face,
    )


def _parse_edge(args: Sequence[str], vertex_count: int | None, lineno: int) -> EdgeSpec:
    if vertex_count is None:
        raise InstanceSyntaxError("'vertices' must precede 'edge'", lineno)
    if len(args) < 3:
        raise InstanceSyntaxError("usage: edge <u> <v> supply <c> | demand", lineno)
    u = _to_int(args[0], "endpoint", lineno)
    v = _to_int(args[1], "endpoint", lineno)
    for endpoint in (u, v):
        if not 0 <= endpoint < vertex_count:
            raise InstanceSyntaxError(f"endpoint {endpoint} out of range", lineno)
    if u == v:
        raise InstanceSyntaxError(f"loop at vertex {u}", lineno)

    role = args[2]
    if role == EdgeRole.SUPPLY.value:
        if len(args) != 4:
            raise InstanceSyntaxError("supply edges need exactly one capacity", lineno)
        capacity = _to_int(args[3], "capacity", lineno)
        if capacity < 0:
            raise InstanceSyntaxError("capacity must be nonnegative", lineno)
        return EdgeSpec(u, v, EdgeRole.SUPPLY, capacity)
    if role == EdgeRole.DEMAND.value:
        if len(args) != 3:
            raise InstanceSyntaxError("demand edges carry no capacity", lineno)
        return EdgeSpec(u, v, EdgeRole.DEMAND)
    raise InstanceSyntaxError(f"edge role must be supply or demand, got {role!r}", lineno)


def serialize(inst: Instance) -> str:
    """Renders an instance as planemf text; `parse` inverts it."""
    lines = [" ".join(HEADER), f"vertices {inst.vertex_count}"]
    for spec in inst.edge_specs():
        if spec.role is EdgeRole.SUPPLY:
            lines.append(f"edge {spec.u} {spec.v} supply {spec.capacity}")
        else:
            lines.append(f"edge {spec.u} {spec.v} demand")
    for vertex, order in enumerate(inst.plane.rotation):
        lines.append(" ".join(["rotation", str(vertex), *map(str, order)]))
    lines.append(f"outer {inst.plane.outer_face}")
    return "\n".join(lines) + "\n"


def rational_to_json(value: Fraction | int) -> dict[str, int]:
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator}


def rational_from_json(data: Any) -> Fraction:
    """Accepts `{num, den}`, an integer, or a `"p/q"` string."""
    if isinstance(data, dict):
        return Fraction(int(data["num"]), int(data["den"]))
    if isinstance(data, (int, str)) and not isinstance(data, bool):
        return Fraction(data)
    raise ValueError(f"not a rational: {data!r}")


def path_to_json(path: SupplyPath) -> dict[str, Any]:
    return {
        "demand": path.demand,
        "vertices": list(path.vertices),
        "edges": list(path.edges),
    }


def flow_to_json(flow: Flow) -> list[dict[str, Any]]:
    return [
        {**path_to_json(path), "value": rational_to_json(amount)}
        for path, amount in sorted(flow.values.items())
    ]


def flow_from_json(inst: Instance, data: Sequence[dict[str, Any]]) -> Flow:
    """
    Reads a flow written by `flow_to_json`.

    `edges` may be omitted; each step then uses the smallest-id supply edge
    between its two vertices. Paths are not validated here; see
    `fractional_flow.check_feasible`.
    """
    items = []
    for entry in data:
        vertices = [int(vertex) for vertex in entry["vertices"]]
        if "edges" in entry:
            edges = [int(edge) for edge in entry["edges"]]
        else:
            try:
                edges = [
                    inst.edge_between(u, v, EdgeRole.SUPPLY)
                    for u, v in zip(vertices, vertices[1:])
                ]
            except KeyError as exc:
                raise ValueError(f"flow path {vertices} leaves the supply graph") from exc
        path = SupplyPath.canonical(int(entry["demand"]), vertices, edges)
        items.append((path, rational_from_json(entry["value"])))
    return Flow.from_items(items)
