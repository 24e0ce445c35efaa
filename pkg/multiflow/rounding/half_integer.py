from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import networkx as nx

from config.settings.solver_settings import SolverSettings
from multiflow.fractional_flow import check_feasible
from multiflow.instance_io.model import Flow, Instance, SupplyPath
from multiflow.laminar import LaminarFlow, chain, laminarize
from multiflow.plane_core import Shore
from multiflow.rounding.chain_lp import ChainLP, build_chain_lp, greedy_chain_lp
from utils.logging_utils import create_log_message

FlowLike = Union[Flow, LaminarFlow]


class RoundingError(RuntimeError):
    """Raised when a rounded flow fails its final check."""


class CapacityUnderflow(RuntimeError):
    """Raised when half paths need more slots than an edge has capacity left."""


def as_laminar(
    inst: Instance, flow: FlowLike, settings: SolverSettings | None = None
) -> LaminarFlow:
    if isinstance(flow, LaminarFlow):
        return flow
    return laminarize(inst, flow, settings)


def _flow_from_chain_solution(clp: ChainLP, lf: LaminarFlow, x, scale: Fraction) -> Flow:
    return Flow.from_items(
        (lf.paths[shore], amount * scale) for shore, amount in zip(clp.shores, x)
    )


def _verify(inst: Instance, flow: Flow, slack: int, minimum: Fraction, what: str) -> None:
    report = check_feasible(inst, flow, slack=slack)
    if not report.feasible:
        raise RoundingError(f"{what} overloads edge {report.witness}")
    if flow.value < minimum:
        raise RoundingError(f"{what} has value {flow.value} below {minimum}")


def half_integer_round(
    inst: Instance, flow: FlowLike, settings: SolverSettings | None = None
) -> Flow:
    """
    A feasible half-integral flow of at least half the value of `flow`.

    Every chain of shores across a supply edge e gets the bound c(e); an
    integral optimum x of that chain LP is at least |flow| and x/2 is
    feasible, since each edge sees two chains.

    Args:
        inst (Instance): The instance.
        flow (Flow | LaminarFlow): A feasible flow; laminarized if needed.
        settings (SolverSettings | None): Cross-check and verification switches.

    Returns:
        Flow: The half-integral flow.

    Raises:
        ChainLPMismatch: If the chain LP cross-check fails.
        RoundingError: If the output fails its feasibility or value check.
    """
    settings = settings or SolverSettings()
    lf = as_laminar(inst, flow, settings)
    clp = build_chain_lp(inst, lf, lambda edge, _: inst.capacity(edge))
    solution = greedy_chain_lp(clp, cross_check=settings.cross_check_chain_lp)
    result = _flow_from_chain_solution(clp, lf, solution.x, Fraction(1, 2))

    if settings.verify_outputs:
        _verify(inst, result, 0, lf.value / 2, "half-integral rounding")
        assert result.is_half_integer()
    logging.info(
        create_log_message(
            "Rounded to half-integral flow", input=lf.value, output=result.value
        )
    )
    return result


def plus_one_round(
    inst: Instance, flow: FlowLike, settings: SolverSettings | None = None
) -> Flow:
    """
    An integral flow of value at least |flow| that overloads no edge by more than one.

    The chain of shores across e from u to v gets the bound ceil(d(u, v)),
    where d(u, v) is the total value of that chain.
    """
    settings = settings or SolverSettings()
    lf = as_laminar(inst, flow, settings)
    weights = lf.weights

    def bound(_: int, members: tuple[Shore, ...]) -> int:
        return math.ceil(sum((weights[shore] for shore in members), Fraction(0)))

    clp = build_chain_lp(inst, lf, bound)
    solution = greedy_chain_lp(clp, cross_check=settings.cross_check_chain_lp)
    result = _flow_from_chain_solution(clp, lf, solution.x, Fraction(1))

    if settings.verify_outputs:
        _verify(inst, result, 1, lf.value, "plus-one rounding")
        assert result.is_integer()
    logging.info(
        create_log_message(
            "Rounded to integral flow on c+1", input=lf.value, output=result.value
        )
    )
    return result


@dataclass(frozen=True)
class HalfSplit:
    """
    The value-1/2 shores left after taking out integer parts.

    Attributes:
        shores (tuple): Shores of value 1/2, indexed by position.
        paths (tuple): The supply path of each shore.
        residual (dict): Capacity per supply edge left after the integer part.
        slots (dict): Per supply edge, its slots as tuples of shore indices;
            a slot holds at most two shores.
        intersection (nx.Graph): Shores as nodes, joined when they share a slot.
    """

    shores: tuple[Shore, ...]
    paths: tuple[SupplyPath, ...]
    residual: Mapping[int, int]
    slots: Mapping[int, tuple[tuple[int, ...], ...]]
    intersection: nx.Graph

    def __len__(self) -> int:
        return len(self.shores)

    @property
    def value(self) -> Fraction:
        return Fraction(len(self.shores), 2)


def split_integer_part(
    inst: Instance, lf: LaminarFlow
) -> tuple[Flow, LaminarFlow, dict[int, int]]:
    """
    Splits a half-integral laminar flow into floors and halves.

    Returns:
        tuple: The integer part, the laminar flow of the remaining 1/2
            values, and the capacities the integer part leaves over.

    Raises:
        ValueError: If some value is not a multiple of 1/2.
    """
    integer_items = []
    halves = []
    for shore, value in lf.entries:
        if value.denominator not in (1, 2):
            raise ValueError(f"shore {shore} carries {value}, not a multiple of 1/2")
        whole = math.floor(value)
        if whole:
            integer_items.append((lf.paths[shore], whole))
        if value != whole:
            halves.append((shore, Fraction(1, 2)))
    integer_part = Flow.from_items(integer_items)

    residual = {edge: inst.capacity(edge) for edge in inst.supply_edges}
    for edge, load in integer_part.loads().items():
        residual[edge] -= int(load)
        if residual[edge] < 0:
            raise CapacityUnderflow(f"integer part overloads edge {edge}")
    half_flow = LaminarFlow(
        entries=tuple(halves),
        paths={shore: lf.paths[shore] for shore, _ in halves},
        face_count=lf.face_count,
    )
    return integer_part, half_flow, residual


def refine_halves(inst: Instance, hf: FlowLike) -> tuple[Flow, HalfSplit]:
    """
    Separates integer parts and lays the 1/2 shores into unit slots.

    Across supply edge e with dual uv the shores crossing e form the chains
    L(u, v) and L(v, u). They are listed from the outermost of L(u, v) inwards
    and then from the innermost of L(v, u) outwards, and consecutive pairs
    share a slot, as if e were split into c'(e) parallel unit edges.

    Raises:
        CapacityUnderflow: If an edge needs more slots than its residual
            capacity, which a feasible input never does.
    """
    lf = as_laminar(inst, hf)
    integer_part, halves, residual = split_integer_part(inst, lf)
    index = {shore: position for position, shore in enumerate(halves.shores)}
    dm = inst.dual

    slots: dict[int, tuple[tuple[int, ...], ...]] = {}
    intersection = nx.Graph()
    intersection.add_nodes_from(range(len(halves)))
    for edge in inst.supply_edges:
        if dm.is_loop(edge):
            continue
        u, v = dm.endpoints[edge]
        order = [index[shore] for shore in reversed(chain(halves, u, v))]
        order += [index[shore] for shore in chain(halves, v, u)]
        if not order:
            continue
        grouped = tuple(tuple(order[i : i + 2]) for i in range(0, len(order), 2))
        if len(grouped) > residual[edge]:
            raise CapacityUnderflow(
                f"edge {edge} needs {len(grouped)} slots but has {residual[edge]} left"
            )
        slots[edge] = grouped
        for slot in grouped:
            if len(slot) == 2:
                intersection.add_edge(*slot)

    split = HalfSplit(
        shores=halves.shores,
        paths=tuple(halves.paths[shore] for shore in halves.shores),
        residual=residual,
        slots=slots,
        intersection=intersection,
    )
    logging.debug(
        create_log_message(
            "Refined half-integral flow",
            integer_value=integer_part.value,
            halves=len(split),
            conflicts=intersection.number_of_edges(),
        )
    )
    return integer_part, split
