from __future__ import annotations

import logging
import math

import networkx as nx

from utils.logging_utils import create_log_message


class TargetUnreachable(RuntimeError):
    """Raised when the maximum stable set is smaller than requested."""


def maximum_stable_set(graph: nx.Graph) -> list:
    """
    An exact maximum independent set by branch and bound.

    Vertices of degree at most one are taken greedily. Otherwise the search
    branches on a vertex of maximum degree (smallest label first), trying
    "take it" before "drop it", and prunes when the chosen vertices plus all
    candidates cannot beat the best set found.
    """
    adjacency = {node: set(graph[node]) - {node} for node in graph.nodes}
    best: list = []

    def search(chosen: list, candidates: frozenset) -> None:
        nonlocal best
        if len(chosen) + len(candidates) <= len(best):
            return
        if not candidates:
            best = sorted(chosen)
            logging.debug(create_log_message("Improved stable set", size=len(best)))
            return
        degree = {node: len(adjacency[node] & candidates) for node in candidates}
        low = [node for node in candidates if degree[node] <= 1]
        if low:
            node = min(low)
            search([*chosen, node], candidates - {node} - adjacency[node])
            return
        node = min(candidates, key=lambda member: (-degree[member], member))
        search([*chosen, node], candidates - {node} - adjacency[node])
        search(chosen, candidates - {node})

    search([], frozenset(adjacency))
    return best


def stable_set(graph: nx.Graph, target: int | None = None) -> frozenset:
    """
    A maximum stable set, checked against a lower bound.

    Args:
        graph (nx.Graph): A simple graph with sortable node labels.
        target (int | None): Required size; defaults to ceil(n/4), which
            every planar graph meets.

    Returns:
        frozenset: The stable set.

    Raises:
        TargetUnreachable: If the maximum stable set is below `target`.
    """
    if target is None:
        target = math.ceil(graph.number_of_nodes() / 4)
    chosen = maximum_stable_set(graph)
    if len(chosen) < target:
        raise TargetUnreachable(
            f"maximum stable set has {len(chosen)} vertices, {target} required"
        )
    return frozenset(chosen)
