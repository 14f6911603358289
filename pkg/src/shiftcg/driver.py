"""Column generation driver: inner pricing loop plus the column-fixing outer loop.

The inner loop alternates master solves with per-shift pricing until pricing
yields nothing new, the objective stalls, or the wall clock runs out. The
outer loop turns the final fractional solution integral by repeatedly fixing
the largest fractional column and re-entering the inner loop; once the time
budget is spent, later passes skip pricing entirely and only fix.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .columns import Column, StopTime
from .graph import RoutingGraph, build_graph
from .instance import Instance
from .master import (
    EPS_INT,
    MasterInfeasibleError,
    MasterSolution,
    find_max_fractional_column,
    solve_rlmp,
)
from .pricing import PricingConfig, solve_pricing, time_update
from .shifts import Shift, shifts_for
from .validate import integer_objective, served_riders

STATUS_CONVERGED = "converged"
STATUS_TIME_LIMIT = "time_limit"
STATUS_STALLED = "stalled"
STATUS_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveConfig:
    time_limit: float | None = None
    stall_iters: int = 20
    pricing: PricingConfig = PricingConfig()
    lp_backend: str = "bundled"
    jobs: int = 1
    objective_eps: float = 1e-9


@dataclass
class TraceRecorder:
    """Optional record of pool columns and master activity for label extraction."""

    instance_dict: dict | None = None
    columns: list[dict] = field(default_factory=list)
    solves: list[dict[int, float]] = field(default_factory=list)

    def on_column(self, col: Column) -> None:
        self.columns.append(
            {
                "id": col.id,
                "shift_index": col.shift.index,
                "stops": list(col.stops),
                "served": sorted(col.served_requests),
            }
        )

    def on_master(self, sol: MasterSolution) -> None:
        self.solves.append({cid: v for cid, v in sol.lambdas.items() if v > EPS_INT})

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "instance": self.instance_dict,
            "columns": self.columns,
            "solves": [
                {str(cid): v for cid, v in solve.items()} for solve in self.solves
            ],
        }


@dataclass
class PhaseResult:
    solution: MasterSolution
    reason: str  # converged | stalled | time_limit
    objectives: list[float]


@dataclass
class SolveReport:
    columns: list[Column]
    objective: int
    served_riders: list[int]
    iterations: int
    fixes: list[int]
    wall_time: float
    status: str
    first_phase_objective: float
    lambdas: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Solution payload. Deliberately excludes wall-clock time so equal
        seeds and configs reproduce byte-identical files; timing lives in the
        run manifest."""
        return {
            "format_version": 1,
            "status": self.status,
            "objective": self.objective,
            "served_riders": self.served_riders,
            "iterations": self.iterations,
            "fixes": self.fixes,
            "first_phase_objective": round(self.first_phase_objective, 9),
            "routes": [c.to_dict() for c in self.columns],
        }


class ColumnPool:
    """The only mutator of the column set; assigns ids in admission order."""

    def __init__(self, trace: TraceRecorder | None = None):
        self.columns: list[Column] = []
        self.by_id: dict[int, Column] = {}
        self._signatures: set[tuple] = set()
        self._trace = trace

    def __len__(self) -> int:
        return len(self.columns)

    def add(self, col: Column) -> Column | None:
        """Admit a column unless an identical route is already pooled."""
        sig = col.signature()
        if sig in self._signatures:
            return None
        admitted = col.with_id(len(self.columns))
        self.columns.append(admitted)
        self.by_id[admitted.id] = admitted
        self._signatures.add(sig)
        if self._trace is not None:
            self._trace.on_column(admitted)
        return admitted


def singleton_column(
    request_id: int, shift: Shift, graph: RoutingGraph
) -> Column | None:
    """Depot -> pickup -> dropoff -> depot for one request, if the shift allows it."""
    n = graph.n
    stops = (0, request_id, n + request_id, graph.dest_depot)
    times = [StopTime(shift.start, shift.start, shift.start)]
    t_depart = shift.start
    for i, j in zip(stops, stops[1:]):
        if not graph.has_edge(i, j):
            return None
        node = graph.nodes[j]
        t_a, t_s, t_d = time_update(
            t_depart, graph.travel_time(i, j), node.window[0], node.service_time
        )
        if t_a > node.window[1] or t_a > shift.end or t_d > shift.end:
            return None
        times.append(StopTime(t_a, t_s, t_d))
        t_depart = t_d
    return Column(
        id=-1,
        shift=shift,
        stops=stops,
        stop_times=tuple(times),
        served_requests=frozenset({request_id}),
    )


def seed_pool(pool: ColumnPool, graph: RoutingGraph, shifts: list[Shift]) -> None:
    """One singleton column per request, under its earliest covering shift."""
    for r in range(1, graph.n + 1):
        for shift in shifts:
            col = singleton_column(r, shift, graph)
            if col is not None:
                pool.add(col)
                break


def _price_all_shifts(
    sol: MasterSolution,
    shifts: list[Shift],
    graph: RoutingGraph,
    capacity: int,
    config: SolveConfig,
) -> list[Column]:
    def price(shift: Shift) -> list[Column]:
        return solve_pricing(
            sol.duals_pi, sol.dual_sigma, shift, graph, capacity, config.pricing
        )

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(price, shifts))
    else:
        results = [price(s) for s in shifts]
    merged: list[Column] = []
    for cols in results:  # merge deterministically: shift order, then discovery order
        merged.extend(cols)
    return merged


def column_generation_fixed(
    pool: ColumnPool,
    fixed: set[int],
    instance: Instance,
    graph: RoutingGraph,
    shifts: list[Shift],
    config: SolveConfig,
    deadline: float | None = None,
    trace: TraceRecorder | None = None,
) -> PhaseResult:
    """Inner loop: master solve, price every shift, admit new columns, repeat."""
    objectives: list[float] = []
    flat = 0
    while True:
        sol = solve_rlmp(pool.columns, fixed, instance, backend=config.lp_backend)
        if trace is not None:
            trace.on_master(sol)
        if objectives and abs(sol.objective - objectives[-1]) <= config.objective_eps:
            flat += 1
        else:
            flat = 0
        objectives.append(sol.objective)
        if flat >= config.stall_iters:
            return PhaseResult(sol, STATUS_STALLED, objectives)
        if deadline is not None and time.monotonic() >= deadline:
            return PhaseResult(sol, STATUS_TIME_LIMIT, objectives)

        new_count = 0
        for col in _price_all_shifts(sol, shifts, graph, instance.capacity, config):
            if pool.add(col) is not None:
                new_count += 1
        if new_count == 0:
            return PhaseResult(sol, STATUS_CONVERGED, objectives)


def solve(
    instance: Instance,
    config: SolveConfig = SolveConfig(),
    graph: RoutingGraph | None = None,
    trace: TraceRecorder | None = None,
) -> SolveReport:
    """Full solve: column generation plus fix-to-integrality."""
    start = time.monotonic()
    deadline = start + config.time_limit if config.time_limit is not None else None
    if graph is None:
        graph = build_graph(instance)
    shifts = shifts_for(instance)

    if trace is not None:
        trace.instance_dict = instance.to_dict()
    pool = ColumnPool(trace)
    seed_pool(pool, graph, shifts)

    fixed: set[int] = set()
    blacklist: set[int] = set()
    fixes: list[int] = []
    iterations = 0
    first_phase_objective: float | None = None
    hit_time_limit = False
    stalled = False
    status = None
    sol: MasterSolution | None = None

    while True:
        timed_out = deadline is not None and time.monotonic() >= deadline
        try:
            if timed_out and sol is not None:
                # search phase: no more pricing, just re-solve under the fixes
                sol = solve_rlmp(pool.columns, fixed, instance, backend=config.lp_backend)
                if trace is not None:
                    trace.on_master(sol)
                iterations += 1
                hit_time_limit = True
            else:
                phase = column_generation_fixed(
                    pool, fixed, instance, graph, shifts, config, deadline, trace
                )
                sol = phase.solution
                iterations += len(phase.objectives)
                if phase.reason == STATUS_TIME_LIMIT:
                    hit_time_limit = True
                elif phase.reason == STATUS_STALLED:
                    stalled = True
        except MasterInfeasibleError:
            if not fixes:
                status = STATUS_INFEASIBLE
                break
            bad = fixes.pop()
            fixed.discard(bad)
            blacklist.add(bad)
            continue

        if first_phase_objective is None:
            first_phase_objective = sol.objective

        if sol.is_integral():
            break
        try:
            target = find_max_fractional_column(sol, fixed | blacklist, pool.by_id)
        except ValueError:
            status = STATUS_INFEASIBLE  # fractional but nothing fixable left
            break
        fixed.add(target)
        fixes.append(target)

    wall = time.monotonic() - start
    if status is None:
        if hit_time_limit:
            status = STATUS_TIME_LIMIT
        elif stalled:
            status = STATUS_STALLED
        else:
            status = STATUS_CONVERGED

    if status == STATUS_INFEASIBLE or sol is None:
        return SolveReport(
            columns=[],
            objective=0,
            served_riders=[],
            iterations=iterations,
            fixes=fixes,
            wall_time=wall,
            status=STATUS_INFEASIBLE,
            first_phase_objective=first_phase_objective or 0.0,
        )

    chosen = [pool.by_id[cid] for cid in sol.chosen_ids()]
    riders = served_riders(chosen, instance)
    return SolveReport(
        columns=chosen,
        objective=integer_objective(chosen, instance),
        served_riders=riders,
        iterations=iterations,
        fixes=fixes,
        wall_time=wall,
        status=status,
        first_phase_objective=first_phase_objective or 0.0,
        lambdas=dict(sol.lambdas),
    )
