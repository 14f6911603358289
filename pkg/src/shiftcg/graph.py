"""Pickup/delivery routing graph with time-window arc elimination.

Nodes are indexed 0 (origin depot), 1..n (pickups), n+1..2n (drop-offs),
2n+1 (destination depot). A directed arc (i, j) survives only if it is
structurally possible and ``a_i + s_i + t_ij <= b_j``, where windows bound
the service *start* (arriving early and waiting is always allowed, so an
early arrival never kills an arc).

Per-request arcs {(0, r), (r, n+r), (n+r, 2n+1)} are mandatory: instance
validation guarantees them time-feasible, and the graph reducer re-inserts
them unconditionally, so any graph this module accepts can serve every
request with a singleton tour.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geo import drive_minutes
from .instance import Instance, InstanceError, servable_in_some_shift

ORIGIN_DEPOT = "origin_depot"
PICKUP = "pickup"
DROPOFF = "dropoff"
DEST_DEPOT = "dest_depot"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    index: int
    kind: str
    request_id: int | None
    demand: int
    service_time: int
    window: tuple[int, int]


class RoutingGraph:
    """Immutable node/arc structure shared read-only by all pricing workers."""

    def __init__(self, nodes: list[Node], edges: dict[tuple[int, int], int], n: int):
        self.n = n
        self.nodes = tuple(nodes)
        self._edges = dict(edges)
        adj: list[list[int]] = [[] for _ in range(len(nodes))]
        for i, j in edges:
            adj[i].append(j)
        # sorted successor lists keep pricing iteration order independent of
        # dict insertion order (reduced and rebuilt graphs must solve alike)
        self._adjacency: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self._succ: tuple[dict[int, int], ...] = tuple(
            {j: self._edges[(i, j)] for j in self._adjacency[i]} for i in range(len(nodes))
        )

    def successor_times(self, i: int) -> dict[int, int]:
        """Successors of i mapped to travel time, in ascending node order."""
        return self._succ[i]

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def dest_depot(self) -> int:
        return 2 * self.n + 1

    @property
    def edges(self) -> dict[tuple[int, int], int]:
        return self._edges

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self._edges

    def successors(self, i: int) -> tuple[int, ...]:
        return self._adjacency[i]

    def travel_time(self, i: int, j: int) -> int:
        try:
            return self._edges[(i, j)]
        except KeyError:
            raise GraphError(f"no edge ({i}, {j}) in graph") from None

    def mandatory_edges(self) -> set[tuple[int, int]]:
        out = set()
        for r in range(1, self.n + 1):
            out.update({(0, r), (r, self.n + r), (self.n + r, self.dest_depot)})
        return out

    def with_edges(self, edges: dict[tuple[int, int], int]) -> "RoutingGraph":
        return RoutingGraph(list(self.nodes), edges, self.n)

    def edge_rows(self) -> list[tuple[int, int, int]]:
        return sorted((i, j, t) for (i, j), t in self._edges.items())

    def dump_edges_csv(self, path: str | Path | None = None) -> str:
        """Write (or return) the edge universe as "i,j,t_ij" CSV rows."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["i", "j", "t_ij"])
        for i, j, t in self.edge_rows():
            writer.writerow([i, j, t])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def node_positions(instance: Instance) -> list[tuple[float, float]]:
    """Geo-point of each node index, depot twice at the ends."""
    pos = [instance.depot]
    pos += [r.origin for r in instance.requests]
    pos += [r.destination for r in instance.requests]
    pos.append(instance.depot)
    return pos


def build_nodes(instance: Instance) -> list[Node]:
    n = instance.n
    nodes: list[Node] = [
        Node(0, ORIGIN_DEPOT, None, 0, 0, (instance.shift_earliest, instance.shift_latest))
    ]
    for r in instance.requests:
        nodes.append(Node(r.id, PICKUP, r.id, r.demand, r.service_time, r.pickup_window))
    for r in instance.requests:
        nodes.append(Node(n + r.id, DROPOFF, r.id, -r.demand, r.service_time, r.dropoff_window))
    nodes.append(
        Node(2 * n + 1, DEST_DEPOT, None, 0, 0, (instance.shift_earliest, instance.shift_latest))
    )
    return nodes


def structurally_allowed(i: Node, j: Node, n: int) -> bool:
    """Arcs a feasible tour could ever traverse.

    Beyond no-self-loop / nothing-into-0 / nothing-out-of-2n+1, pairing and
    precedence rule out: drop-off back to its own pickup, depot straight to a
    drop-off, and a pickup straight to the destination depot.
    """
    if i.index == j.index:
        return False
    if j.kind == ORIGIN_DEPOT or i.kind == DEST_DEPOT:
        return False
    if i.kind == DROPOFF and j.kind == PICKUP and i.request_id == j.request_id:
        return False
    if i.kind == ORIGIN_DEPOT and j.kind == DROPOFF:
        return False
    if i.kind == PICKUP and j.kind == DEST_DEPOT:
        return False
    return True


def edge_allowed(i: Node, j: Node, t_ij: int, n: int) -> bool:
    """Full retention predicate: structural rule and a_i + s_i + t_ij <= b_j."""
    return (
        structurally_allowed(i, j, n)
        and i.window[0] + i.service_time + t_ij <= j.window[1]
    )


def travel_matrix(instance: Instance) -> np.ndarray:
    pos = node_positions(instance)
    size = len(pos)
    t = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            if i != j:
                t[i, j] = drive_minutes(pos[i], pos[j], instance.speed)
    return t


def build_graph(instance: Instance) -> RoutingGraph:
    """Construct the routing graph; reject requests no shift can ever serve."""
    for trip in instance.requests:
        if not servable_in_some_shift(instance, trip):
            raise InstanceError(
                f"request {trip.id}: depot->pickup->dropoff->depot chain fits no shift"
            )
    nodes = build_nodes(instance)
    t = travel_matrix(instance)
    n = instance.n
    edges: dict[tuple[int, int], int] = {}
    for ni in nodes:
        for nj in nodes:
            t_ij = int(t[ni.index, nj.index])
            if edge_allowed(ni, nj, t_ij, n):
                edges[(ni.index, nj.index)] = t_ij
    graph = RoutingGraph(nodes, edges, n)
    missing = graph.mandatory_edges() - set(edges)
    if missing:
        raise GraphError(f"mandatory edges eliminated: {sorted(missing)}")
    return graph
