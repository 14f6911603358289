"""Brute-force ground truth for desk-scale instances.

Enumerates every feasible route per shift by depth-first search, then picks
the best selection of at most fleet-size routes under all-or-nothing riders.
Deliberately shares no code with the pricing DP beyond the graph itself, so
it can arbitrate pricing and driver results in tests. Factorial blow-up is
held off by hard caps; exceeding them raises instead of hanging.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .columns import Column, StopTime
from .graph import RoutingGraph
from .instance import Instance
from .shifts import Shift
from .validate import integer_objective

DEFAULT_MAX_REQUESTS = 6
DEFAULT_MAX_SHIFTS = 4


class OracleCapError(RuntimeError):
    pass


def enumerate_routes(
    graph: RoutingGraph,
    shift: Shift,
    capacity: int,
    max_requests: int = DEFAULT_MAX_REQUESTS,
) -> list[Column]:
    """Every nonempty feasible route for one shift, duplicate-free."""
    n = graph.n
    if n > max_requests:
        raise OracleCapError(f"{n} requests exceed the oracle cap of {max_requests}")
    nodes = graph.nodes
    dest = graph.dest_depot
    routes: list[Column] = []

    def visit(stops, times, t_depart, load, onboard, done):
        here = stops[-1]
        for j in graph.successors(here):
            node = nodes[j]
            t_a = t_depart + graph.travel_time(here, j)
            if t_a > node.window[1] or t_a > shift.end:
                continue
            t_s = max(t_a, node.window[0])
            t_d = t_s + node.service_time
            if j == dest:
                if onboard or not done:
                    continue  # passengers still aboard, or empty tour
                routes.append(
                    Column(
                        id=-1,
                        shift=shift,
                        stops=tuple(stops + [j]),
                        stop_times=tuple(times + [StopTime(t_a, t_s, t_d)]),
                        served_requests=frozenset(done),
                    )
                )
                continue
            if t_d > shift.end:
                continue
            if node.kind == "pickup":
                rid = node.request_id
                if rid in done or load + node.demand > capacity:
                    continue
                visit(
                    stops + [j],
                    times + [StopTime(t_a, t_s, t_d)],
                    t_d,
                    load + node.demand,
                    onboard | {rid},
                    done | {rid},
                )
            elif node.kind == "dropoff":
                rid = node.request_id
                if rid not in onboard:
                    continue
                visit(
                    stops + [j],
                    times + [StopTime(t_a, t_s, t_d)],
                    t_d,
                    load + node.demand,
                    onboard - {rid},
                    done,
                )

    visit([0], [StopTime(shift.start, shift.start, shift.start)], shift.start, 0, set(), set())
    return routes


@dataclass
class ExactResult:
    objective: int
    routes: list[Column]
    served_sets: list[frozenset[int]]


def _candidate_served_sets(
    instance: Instance,
    graph: RoutingGraph,
    shifts: list[Shift],
    max_requests: int,
    max_shifts: int,
) -> dict[frozenset[int], Column]:
    if len(shifts) > max_shifts:
        raise OracleCapError(f"{len(shifts)} shifts exceed the oracle cap of {max_shifts}")
    witness: dict[frozenset[int], Column] = {}
    for shift in shifts:
        for col in enumerate_routes(graph, shift, instance.capacity, max_requests):
            # routes only matter through which requests they serve
            witness.setdefault(col.served_requests, col)
    return witness


def solve_exact(
    instance: Instance,
    graph: RoutingGraph,
    shifts: list[Shift],
    max_requests: int = DEFAULT_MAX_REQUESTS,
    max_shifts: int = DEFAULT_MAX_SHIFTS,
) -> ExactResult:
    """Optimal served-request count by exhaustive route selection."""
    witness = _candidate_served_sets(instance, graph, shifts, max_requests, max_shifts)
    served_sets = sorted(witness, key=sorted)
    best_value = 0
    best_pick: tuple[frozenset[int], ...] = ()
    fleet = instance.fleet_size
    for size in range(1, min(fleet, len(served_sets)) + 1):
        for pick in combinations(served_sets, size):
            cols = [witness[s] for s in pick]
            value = integer_objective(cols, instance)
            if value > best_value:
                best_value = value
                best_pick = pick
    routes = [witness[s] for s in best_pick]
    return ExactResult(objective=best_value, routes=routes, served_sets=list(best_pick))


def oracle_lp_objective(
    instance: Instance,
    graph: RoutingGraph,
    shifts: list[Shift],
    max_requests: int = DEFAULT_MAX_REQUESTS,
    max_shifts: int = DEFAULT_MAX_SHIFTS,
) -> float:
    """LP optimum over the fully enumerated route set, via an independent
    solver (scipy HiGHS), for bracketing the column generation bound."""
    from scipy.optimize import linprog

    witness = _candidate_served_sets(instance, graph, shifts, max_requests, max_shifts)
    served_sets = sorted(witness, key=sorted)
    riders = instance.riders
    rider_pos = {u.id: k for k, u in enumerate(riders)}
    n = instance.n
    n_vars = len(riders) + len(served_sets)

    c = np.zeros(n_vars)
    for k, u in enumerate(riders):
        c[k] = len(u.request_ids)
    a = np.zeros((n + 1, n_vars))
    b = np.zeros(n + 1)
    for r in instance.requests:
        a[r.id - 1, rider_pos[r.rider_id]] = 1.0
    for k, served in enumerate(served_sets):
        var = len(riders) + k
        for rid in served:
            a[rid - 1, var] = -1.0
        a[n, var] = 1.0
    b[n] = float(instance.fleet_size)

    res = linprog(-c, A_ub=a, b_ub=b, bounds=[(0.0, 1.0)] * n_vars, method="highs")
    if not res.success:
        raise RuntimeError(f"oracle LP failed: {res.message}")
    return float(-res.fun)
