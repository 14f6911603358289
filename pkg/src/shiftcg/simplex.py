"""Dense bounded-variable revised simplex for the restricted master problem.

Solves   max c'x   s.t.  A x <= b,  l <= x <= u
and returns row duals alongside the primal point. The basis inverse is kept
explicitly and updated per pivot, with periodic refactorization; Dantzig
pricing switches to Bland's rule after a long degenerate streak.

Scope: desk scale (a few hundred rows, a few thousand columns). The master
problem's lower-bound point is always row-feasible except for over-fixed
fleet capacity, so no phase-1 is needed: an infeasible start raises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9
REFACTOR_EVERY = 100
DEGENERATE_STREAK = 60


class LPError(Exception):
    pass


class LPInfeasibleError(LPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    row_duals: np.ndarray
    iterations: int


def solve_lp_max(
    c: np.ndarray,
    a_ub: np.ndarray,
    b_ub: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    max_iterations: int = 200_000,
) -> LPResult:
    c = np.asarray(c, dtype=float)
    a_ub = np.asarray(a_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m, n_orig = a_ub.shape
    if np.any(lower > upper + TOL):
        raise LPInfeasibleError("variable bounds cross")

    # slack columns complete the basis; slacks are [0, inf)
    n = n_orig + m
    a = np.hstack([a_ub, np.eye(m)])
    cost = np.concatenate([c, np.zeros(m)])
    lo = np.concatenate([lower, np.zeros(m)])
    hi = np.concatenate([upper, np.full(m, np.inf)])

    AT_LOWER, AT_UPPER, BASIC = 0, 1, 2
    status = np.full(n, AT_LOWER, dtype=np.int8)
    x = lo.copy()

    basis = list(range(n_orig, n))
    for idx in basis:
        status[idx] = BASIC
    b_inv = np.eye(m)
    x[basis] = b_ub - a_ub @ lower
    if np.any(x[basis] < -1e-7):
        raise LPInfeasibleError("start point violates a row constraint")
    x[basis] = np.maximum(x[basis], 0.0)

    nonbasic_fixed = lo == hi
    pivots_since_refactor = 0
    degenerate_run = 0
    use_bland = False

    for iteration in range(max_iterations):
        duals = cost[basis] @ b_inv
        reduced = cost - duals @ a

        improving_low = (status == AT_LOWER) & ~nonbasic_fixed & (reduced > TOL)
        improving_up = (status == AT_UPPER) & ~nonbasic_fixed & (reduced < -TOL)
        candidates = np.flatnonzero(improving_low | improving_up)
        if candidates.size == 0:
            obj = float(cost @ x)
            return LPResult(x=x[:n_orig], objective=obj, row_duals=duals, iterations=iteration)

        if use_bland:
            enter = int(candidates[0])
        else:
            enter = int(candidates[np.argmax(np.abs(reduced[candidates]))])
        direction = 1.0 if status[enter] == AT_LOWER else -1.0

        # movement of basics as the entering variable changes by +direction
        col = b_inv @ a[:, enter]
        delta = -direction * col

        limit = hi[enter] - lo[enter]  # bound flip distance
        leave_pos = -1
        leave_to = AT_LOWER
        for i in range(m):
            bi = basis[i]
            if delta[i] < -TOL:
                room = (x[bi] - lo[bi]) / -delta[i]
                if room < limit - TOL:
                    limit, leave_pos, leave_to = room, i, AT_LOWER
            elif delta[i] > TOL:
                if np.isinf(hi[bi]):
                    continue
                room = (hi[bi] - x[bi]) / delta[i]
                if room < limit - TOL:
                    limit, leave_pos, leave_to = room, i, AT_UPPER
        if np.isinf(limit):
            raise LPError("LP is unbounded")
        limit = max(limit, 0.0)

        degenerate_run = degenerate_run + 1 if limit <= TOL else 0
        if degenerate_run > DEGENERATE_STREAK:
            use_bland = True

        x[enter] += direction * limit
        for i in range(m):
            x[basis[i]] += delta[i] * limit

        if leave_pos < 0:
            # entering variable ran to its other bound; basis unchanged
            status[enter] = AT_UPPER if status[enter] == AT_LOWER else AT_LOWER
            continue

        leaving = basis[leave_pos]
        x[leaving] = lo[leaving] if leave_to == AT_LOWER else hi[leaving]
        status[leaving] = leave_to
        status[enter] = BASIC
        basis[leave_pos] = enter

        pivots_since_refactor += 1
        if pivots_since_refactor >= REFACTOR_EVERY:
            b_inv = np.linalg.inv(a[:, basis])
            pivots_since_refactor = 0
        else:
            # rank-1 basis-inverse update: row ops that turn col into e_{leave_pos}
            pivot = col[leave_pos]
            if abs(pivot) < 1e-11:
                b_inv = np.linalg.inv(a[:, basis])
                pivots_since_refactor = 0
            else:
                row = b_inv[leave_pos, :] / pivot
                b_inv -= np.outer(col, row)
                b_inv[leave_pos, :] = row

    raise LPError(f"simplex did not converge within {max_iterations} iterations")
