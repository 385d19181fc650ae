"""Directed multigraph over plane-embedded nodes with per-commodity edge costs.

Nodes are dense integer indices with (x, y) coordinates.  Each edge carries a
cost (and optionally a capacity) per commodity; an edge simply omits the
commodities it does not carry.  All-pairs shortest-path cost matrices are
computed with the Floyd recurrence, one matrix per commodity.  Networks and
distance matrices are immutable after construction, so they can be shared
freely across workers; distinct commodities may be processed concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ScenarioError

INF = math.inf


@dataclass(frozen=True)
class Node:
    """A network vertex: dense integer id plus plane coordinates."""

    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Edge:
    """A directed edge with per-commodity unit costs and optional capacities.

    Commodities absent from ``cost`` are not carried by this edge.  Capacities
    default to unbounded.
    """

    tail: int
    head: int
    cost: Mapping[str, float]
    capacity: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CommodityDistanceMatrix:
    """All-pairs minimum route cost for one commodity; inf where unreachable."""

    commodity: str
    dist: np.ndarray

    def at(self, i: int, j: int) -> float:
        return float(self.dist[i, j])


class Network:
    """Immutable directed network; built via :func:`build_network`."""

    def __init__(self, nodes: Sequence[Node], edges: Sequence[Edge]):
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)
        commodities: set[str] = set()
        for edge in self.edges:
            commodities.update(edge.cost)
        self.commodities = frozenset(commodities)

    def __len__(self) -> int:
        return len(self.nodes)


def euclidean_distance(a: Node, b: Node) -> float:
    """Plane distance between two nodes."""
    return math.hypot(a.x - b.x, a.y - b.y)


def build_network(
    nodes: Sequence[Node],
    edges: Sequence[Edge],
    grid_costs: Mapping[str, tuple[float, float]] | None = None,
) -> Network:
    """Validate nodes/edges and assemble a Network.

    When ``grid_costs`` is given (commodity -> (horizontal, vertical) unit
    cost), each edge's per-commodity cost is derived from its displacement as
    ``h_cost * |dx| + v_cost * |dy|`` for every commodity in the map, i.e.
    the cost of covering the displacement along grid directions; explicit
    edge costs are ignored in that mode.  Undirected instances are ingested
    by listing both arcs.
    """
    ids = [node.id for node in nodes]
    if sorted(ids) != list(range(len(nodes))):
        raise ScenarioError("node ids must be unique and dense 0..n-1")
    for node in nodes:
        if not (math.isfinite(node.x) and math.isfinite(node.y)):
            raise ScenarioError(f"node {node.id} has non-finite coordinates")
    by_id = {node.id: node for node in nodes}

    checked: list[Edge] = []
    for edge in edges:
        if edge.tail not in by_id or edge.head not in by_id:
            raise ScenarioError(f"edge ({edge.tail}, {edge.head}) references an unknown node")
        if edge.tail == edge.head:
            raise ScenarioError(f"self-loop edge at node {edge.tail}")
        if grid_costs is not None:
            a, b = by_id[edge.tail], by_id[edge.head]
            dx, dy = abs(a.x - b.x), abs(a.y - b.y)
            cost = {
                commodity: h * dx + v * dy
                for commodity, (h, v) in grid_costs.items()
            }
            edge = Edge(edge.tail, edge.head, cost, edge.capacity)
        for commodity, value in edge.cost.items():
            if value < 0:
                raise ScenarioError(
                    f"edge ({edge.tail}, {edge.head}) has negative cost for {commodity}"
                )
        for commodity, value in edge.capacity.items():
            if value < 0:
                raise ScenarioError(
                    f"edge ({edge.tail}, {edge.head}) has negative capacity for {commodity}"
                )
        checked.append(edge)
    return Network(nodes, checked)


def all_pairs_shortest_paths(net: Network, commodity: str) -> CommodityDistanceMatrix:
    """Minimum total cost over directed paths, per the Floyd recurrence.

    Requires nonnegative finite edge costs for the commodity; unreachable
    pairs come out as inf, never as a large finite stand-in.  Only costs are
    produced; path reconstruction is out of scope.
    """
    n = len(net)
    dist = np.full((n, n), INF)
    np.fill_diagonal(dist, 0.0)
    for edge in net.edges:
        if commodity not in edge.cost:
            continue
        cost = edge.cost[commodity]
        if cost < 0 or not math.isfinite(cost):
            raise ScenarioError(
                f"edge ({edge.tail}, {edge.head}) cost for {commodity} must be finite and >= 0"
            )
        if cost < dist[edge.tail, edge.head]:
            dist[edge.tail, edge.head] = cost
    for k in range(n):
        np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :], out=dist)
    return CommodityDistanceMatrix(commodity, dist)
