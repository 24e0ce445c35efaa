"""
Exact ground truth for small instances by exhaustive search.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from fractions import Fraction

from config.settings.oracle_settings import OracleSettings
from multiflow.exact_lp import solve_max
from multiflow.fractional_flow import PathExplosion, enumerate_paths, path_lp
from multiflow.instance_io.model import Flow, Instance, PathSet, SupplyPath
from multiflow.multicut import verify_multicut
from utils.logging_utils import create_log_message


class TooLarge(RuntimeError):
    """Raised when an instance exceeds the oracle limits."""


def exact_min_multicut(
    inst: Instance, settings: OracleSettings | None = None
) -> tuple[int, frozenset[int]]:
    """
    A minimum-capacity multicut by include/exclude search over supply edges.

    A branch stops at its first multicut, is pruned once its capacity
    reaches the best found, and is pruned when even taking every undecided
    edge would not separate all demands.

    Raises:
        TooLarge: With more than `max_supply_edges` supply edges.
    """
    settings = settings or OracleSettings()
    edges = inst.supply_edges
    if len(edges) > settings.max_supply_edges:
        raise TooLarge(
            f"{len(edges)} supply edges, the multicut oracle allows"
            f" {settings.max_supply_edges}"
        )
    if not inst.demand_edges:
        return 0, frozenset()

    best_value = inst.total_capacity()
    best = frozenset(edges)

    def search(index: int, chosen: list[int], cost: int) -> None:
        nonlocal best_value, best
        if cost >= best_value:
            return
        if verify_multicut(inst, chosen):
            best_value, best = cost, frozenset(chosen)
            return
        if index == len(edges):
            return
        if not verify_multicut(inst, [*chosen, *edges[index:]]):
            return
        edge = edges[index]
        search(index + 1, chosen, cost)
        search(index + 1, [*chosen, edge], cost + inst.capacity(edge))

    search(0, [], 0)
    logging.info(
        create_log_message("Oracle minimum multicut", value=best_value, multicut=best)
    )
    return best_value, best


def _ordered_paths(paths: PathSet) -> list[SupplyPath]:
    demands = sorted(
        paths.by_demand, key=lambda demand: (len(paths.by_demand[demand]), demand)
    )
    return [path for demand in demands for path in paths.by_demand[demand]]


def _bound(
    inst: Instance, remaining: Sequence[SupplyPath], residual: dict[int, int]
) -> int:
    """Floor of the fractional optimum over `remaining` on residual capacities."""
    if not remaining:
        return 0
    grouped: dict[int, list[SupplyPath]] = {}
    for path in remaining:
        grouped.setdefault(path.demand, []).append(path)
    subset = PathSet(
        by_demand={demand: tuple(group) for demand, group in grouped.items()}
    )
    return math.floor(solve_max(path_lp(inst, subset, residual).lp).value)


def exact_max_integer_flow(
    inst: Instance,
    paths: PathSet | None = None,
    settings: OracleSettings | None = None,
) -> tuple[int, Flow]:
    """
    A maximum integral multiflow by branch and bound over path multiplicities.

    Paths are visited demand by demand, fewest paths first. Each path takes
    every multiplicity its residual capacity allows, largest first, and a
    branch is pruned when its value plus the rounded-down LP bound of the
    remaining paths cannot beat the best found.

    Raises:
        TooLarge: If total capacity exceeds `max_capacity_sum` or there are
            more than `max_paths` paths.
    """
    settings = settings or OracleSettings()
    total = inst.total_capacity()
    if total > settings.max_capacity_sum:
        raise TooLarge(
            f"total capacity {total}, the flow oracle allows"
            f" {settings.max_capacity_sum}"
        )
    if paths is None:
        try:
            paths = enumerate_paths(inst, cap=settings.max_paths)
        except PathExplosion as exc:
            raise TooLarge(str(exc)) from exc
    if len(paths) > settings.max_paths:
        raise TooLarge(
            f"{len(paths)} paths, the flow oracle allows {settings.max_paths}"
        )

    order = _ordered_paths(paths)
    residual = {edge: inst.capacity(edge) for edge in inst.supply_edges}
    best_value = 0
    best: list[tuple[SupplyPath, int]] = []

    def search(index: int, chosen: list[tuple[SupplyPath, int]], value: int) -> None:
        nonlocal best_value, best
        if value > best_value:
            best_value, best = value, list(chosen)
            logging.debug(create_log_message("Improved integral flow", value=value))
        if index == len(order):
            return
        if value + _bound(inst, order[index:], residual) <= best_value:
            return
        path = order[index]
        most = min(residual[edge] for edge in path.edges)
        for amount in range(most, -1, -1):
            for edge in path.edges:
                residual[edge] -= amount
            extended = [*chosen, (path, amount)] if amount else chosen
            search(index + 1, extended, value + amount)
            for edge in path.edges:
                residual[edge] += amount

    search(0, [], 0)
    flow = Flow.from_items(best)
    logging.info(create_log_message("Oracle maximum integral flow", value=best_value))
    return best_value, flow


def exact_max_half_integer_flow(
    inst: Instance,
    paths: PathSet | None = None,
    settings: OracleSettings | None = None,
) -> tuple[Fraction, Flow]:
    """Half the maximum integral flow under doubled capacities."""
    doubled = inst.with_capacities(
        {
            edge: 2 * inst.capacity(edge)
            for edge in inst.supply_edges
            if inst.capacity(edge)
        }
    )
    value, flow = exact_max_integer_flow(doubled, paths, settings)
    return Fraction(value, 2), flow.scaled(Fraction(1, 2))
