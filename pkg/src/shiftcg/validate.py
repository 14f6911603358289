"""Independent feasibility checking for columns and full solutions.

This is the acceptance gate: it re-derives every schedule from the shift
start with its own arithmetic and never trusts stored bookkeeping. Failures
are itemized and name the violated constraint.

Constraint names used in failure messages:
  route_endpoints, edge_missing, node_revisit, pairing, precedence,
  time_propagation, time_window, shift_window, shift_span, capacity,
  served_set, fleet_size, all_or_nothing, objective_mismatch
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .columns import Column
from .graph import DEST_DEPOT, ORIGIN_DEPOT, RoutingGraph
from .instance import Instance


@dataclass
class Verdict:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, constraint: str, detail: str) -> None:
        self.failures.append(f"{constraint}: {detail}")

    def __str__(self) -> str:
        if self.ok:
            return "pass"
        return "fail\n" + "\n".join(f"  - {f}" for f in self.failures)


def validate_route(column: Column, instance: Instance, graph: RoutingGraph) -> Verdict:
    """Check one column against every single-vehicle constraint."""
    v = Verdict()
    stops = column.stops
    tag = f"column {column.id}"

    if len(stops) < 2 or stops[0] != 0 or stops[-1] != graph.dest_depot:
        v.add("route_endpoints", f"{tag} must run from node 0 to node {graph.dest_depot}")
        return v
    interior = stops[1:-1]
    if any(graph.nodes[s].kind in (ORIGIN_DEPOT, DEST_DEPOT) for s in interior):
        v.add("route_endpoints", f"{tag} visits a depot mid-route")
        return v
    if len(set(stops)) != len(stops):
        v.add("node_revisit", f"{tag} visits a node more than once")
        return v
    if len(column.stop_times) != len(stops):
        v.add("time_propagation", f"{tag} has {len(column.stop_times)} stop_times for {len(stops)} stops")
        return v

    picked = {graph.nodes[s].request_id for s in interior if graph.nodes[s].kind == "pickup"}
    dropped = {graph.nodes[s].request_id for s in interior if graph.nodes[s].kind == "dropoff"}
    if picked != dropped:
        v.add("pairing", f"{tag} picks up {sorted(picked)} but drops off {sorted(dropped)}")
    for rid in picked & dropped:
        if stops.index(rid) > stops.index(graph.n + rid):
            v.add("precedence", f"{tag} drops off request {rid} before picking it up")
    if frozenset(picked) != column.served_requests:
        v.add(
            "served_set",
            f"{tag} served_requests {sorted(column.served_requests)} != stops imply {sorted(picked)}",
        )

    shift = column.shift
    if shift.start < instance.shift_earliest or shift.end > instance.shift_latest:
        v.add("shift_window", f"{tag} shift [{shift.start},{shift.end}] outside horizon")

    # re-derive the whole schedule from the shift start
    t_depart = shift.start
    load = 0
    first = column.stop_times[0]
    if (first.arrival, first.service_start, first.departure) != (shift.start,) * 3:
        v.add("time_propagation", f"{tag} stop 0 times must equal the shift start")
    for k in range(1, len(stops)):
        i, j = stops[k - 1], stops[k]
        if not graph.has_edge(i, j):
            v.add("edge_missing", f"{tag} uses missing edge ({i}, {j})")
            return v
        node = graph.nodes[j]
        t_a = t_depart + graph.travel_time(i, j)
        t_s = max(t_a, node.window[0])
        t_d = t_s + node.service_time
        st = column.stop_times[k]
        if (st.arrival, st.service_start, st.departure) != (t_a, t_s, t_d):
            v.add(
                "time_propagation",
                f"{tag} stop {k} stored ({st.arrival},{st.service_start},{st.departure})"
                f" != recomputed ({t_a},{t_s},{t_d})",
            )
        if t_a > node.window[1]:
            v.add("time_window", f"{tag} arrives at node {j} at {t_a} after latest start {node.window[1]}")
        if t_a > shift.end or t_d > shift.end:
            v.add("shift_window", f"{tag} node {j} times run past shift end {shift.end}")
        load += node.demand
        if load > instance.capacity or load < 0:
            v.add("capacity", f"{tag} load {load} outside [0, {instance.capacity}] after node {j}")
        t_depart = t_d
    span = column.stop_times[-1].arrival - shift.start
    if span > instance.shift_duration:
        v.add("shift_span", f"{tag} span {span} exceeds duration {instance.shift_duration}")
    return v


def covered_requests(columns: list[Column]) -> set[int]:
    out: set[int] = set()
    for c in columns:
        out |= c.served_requests
    return out


def integer_objective(columns: list[Column], instance: Instance) -> int:
    """Served requests under all-or-nothing riders, recomputed from scratch."""
    covered = covered_requests(columns)
    total = 0
    for u in instance.riders:
        if all(r in covered for r in u.request_ids):
            total += len(u.request_ids)
    return total


def served_riders(columns: list[Column], instance: Instance) -> list[int]:
    """Riders whose requests are all covered by the given routes."""
    covered = covered_requests(columns)
    return [u.id for u in instance.riders if all(r in covered for r in u.request_ids)]


def validate_solution(
    columns: list[Column],
    instance: Instance,
    graph: RoutingGraph,
    claimed_objective: int | None = None,
    claimed_riders: list[int] | None = None,
) -> Verdict:
    """Full-solution gate: per-route checks, fleet cap, all-or-nothing, objective.

    A route may visit requests of a rider who ends up unserved (they earn no
    credit); what all-or-nothing forbids is *claiming* a rider whose requests
    are not all covered.
    """
    v = Verdict()
    for col in columns:
        route_verdict = validate_route(col, instance, graph)
        v.failures.extend(route_verdict.failures)

    if len(columns) > instance.fleet_size:
        v.add("fleet_size", f"{len(columns)} routes exceed fleet of {instance.fleet_size}")

    covered = covered_requests(columns)
    rider_by_id = {u.id: u for u in instance.riders}
    if claimed_riders is not None:
        for uid in claimed_riders:
            u = rider_by_id.get(uid)
            if u is None:
                v.add("all_or_nothing", f"claimed rider {uid} does not exist")
                continue
            missing = [r for r in u.request_ids if r not in covered]
            if missing:
                v.add(
                    "all_or_nothing",
                    f"claimed rider {uid} is missing coverage for requests {missing}",
                )

    if claimed_objective is not None:
        actual = integer_objective(columns, instance)
        if actual != claimed_objective:
            v.add("objective_mismatch", f"claimed {claimed_objective}, recomputed {actual}")
    return v
