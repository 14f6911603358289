"""Restricted linear master problem over the current column pool.

Maximizes served requests subject to per-request coverage, all-or-nothing
rider service, and the fleet-size cap. Rider coupling is handled by
substitution: one variable y_u per rider shared by all of the rider's
requests, which keeps the row set at (one per request) + (one fleet row).

Duals follow the pricing convention: pi_r >= 0 is the credit for serving
request r, sigma <= 0 so that -sigma >= 0 seeds a route's cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .columns import Column
from .instance import Instance
from .simplex import LPInfeasibleError, solve_lp_max

EPS_INT = 1e-6
EPS_RC = 1e-6
# Vertex steering among alternative LP optima: an infinitesimal objective
# bonus per served request pulls weight onto fewer, fuller columns, which is
# what the column-fixing step needs. Small enough (1e-8 * total served) never
# to outweigh a real objective difference at desk scale.
WEIGHT_EPS = 1e-8


class MasterInfeasibleError(Exception):
    """RLMP has no feasible point under the current fixed columns."""


@dataclass(frozen=True)
class MasterSolution:
    lambdas: dict[int, float]
    y: dict[int, float]
    objective: float
    duals_pi: dict[int, float]
    dual_sigma: float

    def is_integral(self, eps: float = EPS_INT) -> bool:
        return all(v <= eps or v >= 1.0 - eps for v in self.lambdas.values())

    def chosen_ids(self, eps: float = EPS_INT) -> list[int]:
        return sorted(cid for cid, v in self.lambdas.items() if v >= 1.0 - eps)


def solve_rlmp(
    columns: list[Column],
    fixed: set[int],
    instance: Instance,
    backend: str = "bundled",
) -> MasterSolution:
    """Optimal LP over the pool with fixed columns pinned at 1.

    An empty pool short-circuits to the all-zero solution with zero duals
    (nothing is selectable, so no solve happens).
    """
    unknown = fixed - {c.id for c in columns}
    if unknown:
        raise ValueError(f"fixed ids not in pool: {sorted(unknown)}")
    if not columns:
        return MasterSolution(
            lambdas={},
            y={r.id: 0.0 for r in instance.requests},
            objective=0.0,
            duals_pi={r.id: 0.0 for r in instance.requests},
            dual_sigma=0.0,
        )

    riders = instance.riders
    n = instance.n
    rider_pos = {u.id: k for k, u in enumerate(riders)}
    n_riders = len(riders)
    n_cols = len(columns)
    n_vars = n_riders + n_cols

    c = np.zeros(n_vars)
    for k, u in enumerate(riders):
        c[k] = len(u.request_ids)

    # rows: one coverage row per request (y_u - sum of covering lambdas <= 0),
    # then the fleet row (sum lambda <= |F|)
    a = np.zeros((n + 1, n_vars))
    b = np.zeros(n + 1)
    for r in instance.requests:
        a[r.id - 1, rider_pos[r.rider_id]] = 1.0
    for k, col in enumerate(columns):
        var = n_riders + k
        for rid in col.served_requests:
            a[rid - 1, var] = -1.0
        a[n, var] = 1.0
    b[n] = float(instance.fleet_size)

    lower = np.zeros(n_vars)
    upper = np.ones(n_vars)
    for k, col in enumerate(columns):
        if col.id in fixed:
            lower[n_riders + k] = 1.0

    try:
        if backend == "external":
            x, duals = _solve_external(c, a, b, lower, upper)
        elif backend == "bundled":
            res = solve_lp_max(c, a, b, lower, upper)
            x, duals = res.x, res.row_duals
        else:
            raise ValueError(f"unknown LP backend {backend!r}")
    except LPInfeasibleError as exc:
        raise MasterInfeasibleError(str(exc)) from exc

    y_by_rider = {u.id: float(np.clip(x[rider_pos[u.id]], 0.0, 1.0)) for u in riders}
    lambdas = {
        col.id: float(np.clip(x[n_riders + k], 0.0, 1.0)) for k, col in enumerate(columns)
    }
    y = {r.id: y_by_rider[r.rider_id] for r in instance.requests}
    pi = {r.id: max(0.0, float(duals[r.id - 1])) for r in instance.requests}
    sigma = -max(0.0, float(duals[n]))
    return MasterSolution(
        lambdas=lambdas,
        y=y,
        objective=float(sum(y.values())),
        duals_pi=pi,
        dual_sigma=sigma,
    )


def _solve_external(c, a, b, lower, upper):
    """Adapter for an off-the-shelf LP engine (scipy's HiGHS interface)."""
    from scipy.optimize import linprog

    res = linprog(
        -c,
        A_ub=a,
        b_ub=b,
        bounds=list(zip(lower, upper)),
        method="highs",
    )
    if res.status == 2:
        raise LPInfeasibleError("external backend reports infeasible")
    if not res.success:
        raise RuntimeError(f"external LP backend failed: {res.message}")
    # scipy minimizes, so ineqlin marginals are <= 0; negate for max duals
    duals = -np.asarray(res.ineqlin.marginals)
    return np.asarray(res.x), duals


def reduced_cost(column: Column, pi: dict[int, float], sigma: float) -> float:
    """Pricing cost of a column under given duals: -sigma - sum of credits."""
    return -sigma - sum(pi.get(r, 0.0) for r in column.served_requests)


def find_max_fractional_column(
    sol: MasterSolution,
    excluded: set[int],
    columns_by_id: dict[int, Column],
    eps: float = EPS_INT,
) -> int:
    """Unfixed column with the largest fractional value.

    Ties prefer the column serving more requests, then the lower id. Values
    are quantized at the integrality tolerance first, so two columns at the
    same vertex value (e.g. both 2/3 up to solver noise) count as tied.
    """
    best: tuple | None = None
    best_id = None
    for cid, val in sol.lambdas.items():
        if cid in excluded or val <= eps or val >= 1.0 - eps:
            continue
        key = (round(val / eps), len(columns_by_id[cid].served_requests), -cid)
        if best is None or key > best:
            best, best_id = key, cid
    if best_id is None:
        raise ValueError("no fractional column to fix")
    return best_id
