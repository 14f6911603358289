"""Per-shift pricing by best-first labeling dynamic programming.

A label is a partial route state rooted at the origin depot at the shift
start. Request sets (open, reachable, served) are bitmasks with bit r for
request id r. Extraction is best-first by reduced cost; per-node label pools
are pruned by a dominance rule and an optional size cap, and the search
stops early once enough negative-cost complete routes have been found.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

from .columns import Column, StopTime
from .graph import RoutingGraph
from .shifts import Shift


class Label:
    __slots__ = (
        "node",
        "cost",
        "open_mask",
        "reach_mask",
        "served_mask",
        "t_arrive",
        "t_service",
        "t_depart",
        "prev",
        "load",
        "alive",
    )

    def __init__(
        self, node, cost, open_mask, reach_mask, served_mask,
        t_arrive, t_service, t_depart, prev, load,
    ):
        self.node = node
        self.cost = cost
        self.open_mask = open_mask
        self.reach_mask = reach_mask
        self.served_mask = served_mask
        self.t_arrive = t_arrive
        self.t_service = t_service
        self.t_depart = t_depart
        self.prev = prev
        self.load = load
        self.alive = True

    def open_requests(self) -> set[int]:
        return set(_iter_bits(self.open_mask))

    def reachable_requests(self) -> set[int]:
        return set(_iter_bits(self.reach_mask))

    def served_requests(self) -> set[int]:
        return set(_iter_bits(self.served_mask))

    def __repr__(self):
        return (
            f"Label(node={self.node}, cost={self.cost:.4f}, "
            f"O={sorted(self.open_requests())}, S={sorted(self.served_requests())}, "
            f"t=({self.t_arrive},{self.t_service},{self.t_depart}))"
        )


@dataclass(frozen=True)
class PricingConfig:
    max_columns: int | None = 10
    max_labels_per_node: int | None = 200
    dominance: bool = True


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(requests) -> int:
    out = 0
    for r in requests:
        out |= 1 << r
    return out


def time_update(t_depart_prev: int, travel: int, window_open: int, service: int):
    """Arrival, service start (waiting allowed), and departure at the next stop."""
    t_a = t_depart_prev + travel
    t_s = max(t_a, window_open)
    return t_a, t_s, t_s + service


def time_feasible(t_arrive: int, latest_service_start: int, shift_end: int) -> bool:
    return t_arrive <= latest_service_start and t_arrive <= shift_end


def check_dominance(l1: Label, l2: Label) -> bool:
    """True when l2 dominates l1: fewer-or-equal open stops, earlier departure,
    lower-or-equal cost, and at least as many served requests."""
    if l1.node != l2.node:
        raise ValueError("dominance is only defined between labels at one node")
    return (
        (l1.open_mask | l2.open_mask) == l1.open_mask
        and l2.t_depart <= l1.t_depart
        and l2.cost <= l1.cost
        and l2.served_mask.bit_count() >= l1.served_mask.bit_count()
    )


def update_reachable(
    reach_mask: int,
    node: int,
    t_depart: int,
    graph: RoutingGraph,
    shift: Shift,
) -> int:
    """Keep a request only if pickup, drop-off, and depot return can still be
    chained from here; a missing first-hop arc counts as unreachable, and the
    current node's own request (just picked up) always drops out."""
    nodes = graph.nodes
    succ_here = graph.successor_times(node)
    n = graph.n
    dest = graph.dest_depot
    end = shift.end
    out = 0
    for r in _iter_bits(reach_mask):
        if r == node:
            continue
        travel = succ_here.get(r)
        if travel is None:
            continue
        pick = nodes[r]
        t_a = t_depart + travel
        if t_a > pick.window[1] or t_a > end:
            continue
        t_d = max(t_a, pick.window[0]) + pick.service_time
        drop = nodes[n + r]
        t_a = t_d + graph.successor_times(r)[n + r]
        if t_a > drop.window[1] or t_a > end:
            continue
        t_d = max(t_a, drop.window[0]) + drop.service_time
        t_a = t_d + graph.successor_times(n + r)[dest]
        if t_a > end:
            continue
        out |= 1 << r
    return out


def extend_label(
    label: Label,
    pi: dict[int, float],
    sigma: float,
    shift: Shift,
    graph: RoutingGraph,
    capacity: int,
) -> list[Label]:
    """All one-step extensions: depot return, then drop-offs, then pickups."""
    out: list[Label] = []
    nodes = graph.nodes
    n = graph.n
    dest = graph.dest_depot
    i = label.node
    succ = graph.successor_times(i)

    # back to depot: only off-depot, empty-handed, already-improving labels
    if i != 0 and label.open_mask == 0 and label.cost < 0:
        travel = succ.get(dest)
        if travel is not None:
            t_a, t_s, t_d = time_update(
                label.t_depart, travel, nodes[dest].window[0], nodes[dest].service_time
            )
            if time_feasible(t_a, nodes[dest].window[1], shift.end):
                out.append(
                    Label(dest, label.cost, 0, 0, label.served_mask, t_a, t_s, t_d, label, 0)
                )

    for r in _iter_bits(label.open_mask):
        j = n + r
        travel = succ.get(j)
        if travel is None:
            continue
        nj = nodes[j]
        t_a, t_s, t_d = time_update(label.t_depart, travel, nj.window[0], nj.service_time)
        # departing after shift end can never reach the depot in time; pruning
        # here keeps every stored label time inside the shift
        if not time_feasible(t_a, nj.window[1], shift.end) or t_d > shift.end:
            continue
        out.append(
            Label(
                j,
                label.cost,
                label.open_mask ^ (1 << r),
                update_reachable(label.reach_mask, j, t_d, graph, shift),
                label.served_mask,
                t_a,
                t_s,
                t_d,
                label,
                label.load - nodes[r].demand,
            )
        )

    for r in _iter_bits(label.reach_mask):
        travel = succ.get(r)
        if travel is None:
            continue
        bit = 1 << r
        if label.load + nodes[r].demand > capacity or label.open_mask & bit or label.served_mask & bit:
            continue
        nr = nodes[r]
        t_a, t_s, t_d = time_update(label.t_depart, travel, nr.window[0], nr.service_time)
        if not time_feasible(t_a, nr.window[1], shift.end) or t_d > shift.end:
            continue
        out.append(
            Label(
                r,
                label.cost - pi.get(r, 0.0),
                label.open_mask | bit,
                update_reachable(label.reach_mask, r, t_d, graph, shift),
                label.served_mask | bit,
                t_a,
                t_s,
                t_d,
                label,
                label.load + nr.demand,
            )
        )

    return out


def backtrace_route(label: Label, shift: Shift, cost: float) -> Column:
    chain = []
    cur = label
    while cur is not None:
        chain.append(cur)
        cur = cur.prev
    chain.reverse()
    return Column(
        id=-1,
        shift=shift,
        stops=tuple(l.node for l in chain),
        stop_times=tuple(StopTime(l.t_arrive, l.t_service, l.t_depart) for l in chain),
        served_requests=frozenset(_iter_bits(label.served_mask)),
        reduced_cost_at_birth=cost,
    )


def solve_pricing(
    pi: dict[int, float],
    sigma: float,
    shift: Shift,
    graph: RoutingGraph,
    capacity: int,
    config: PricingConfig = PricingConfig(),
) -> list[Column]:
    """Negative-reduced-cost routes for one shift, best ones first.

    Returns at most ``config.max_columns`` columns in discovery order; an
    empty list means no improving route exists under these duals (or none
    was found before the caps cut the search).
    """
    n = graph.n
    max_columns = config.max_columns if config.max_columns is not None else float("inf")
    max_labels = (
        config.max_labels_per_node
        if config.max_labels_per_node is not None
        else float("inf")
    )

    counter = itertools.count()
    all_requests = ((1 << n) - 1) << 1
    root = Label(0, -sigma, 0, all_requests, 0, shift.start, shift.start, shift.start, None, 0)

    heap: list = []
    pools: list[list[Label]] = [[] for _ in range(graph.num_nodes)]

    def push(lab: Label) -> None:
        heapq.heappush(heap, (lab.cost, lab.open_mask.bit_count(), lab.node, next(counter), lab))

    push(root)
    pools[0].append(root)
    found: list[Column] = []

    while heap and len(found) < max_columns:
        _, _, _, _, label = heapq.heappop(heap)
        if not label.alive:
            continue
        for new in extend_label(label, pi, sigma, shift, graph, capacity):
            if new.node == graph.dest_depot:
                found.append(backtrace_route(new, shift, new.cost))
                if len(found) >= max_columns:
                    break
                continue
            pool = pools[new.node]
            if config.dominance:
                dominated = False
                to_remove: list[Label] = []
                for other in pool:
                    if check_dominance(new, other):
                        dominated = True
                        break
                    if check_dominance(other, new):
                        to_remove.append(other)
                if dominated:
                    continue
                for other in to_remove:
                    other.alive = False
                    pool.remove(other)
            pool.append(new)
            push(new)
            while len(pool) > max_labels:
                worst = max(pool, key=lambda l: (l.cost, l.open_mask.bit_count()))
                worst.alive = False
                pool.remove(worst)

    return found
