"""Best-bound branch-and-bound over the embedded simplex."""

from __future__ import annotations

import heapq
import itertools
import math

from ..result import Budget, Clock, SolveResult, Status
from .model import ModelIR
from .simplex import LpStatus, lp_relax

INT_TOL = 1e-6


def _objective_is_integral(model: ModelIR) -> bool:
    integral = set(model.integer_vars())
    return bool(model.objective) and all(
        name in integral and float(coef).is_integer() for name, coef in model.objective.items()
    )


def _branch_var(model: ModelIR, values: dict[str, float]) -> tuple[str, float] | None:
    """Most fractional integer column; the first one wins ties."""
    best, best_frac = None, INT_TOL
    for v in model.variables:
        if not v.integral:
            continue
        x = values[v.name]
        frac = min(x - math.floor(x), math.ceil(x) - x)
        if frac > best_frac + 1e-12:
            best, best_frac = (v.name, x), frac
    return best


def mip_solve(model: ModelIR, budget: Budget | None = None) -> SolveResult:
    """Minimize over the integer points of ``model``.

    Nodes are expanded in order of their LP bound. When every objective column
    is integral with integer coefficients, a node is pruned as soon as the
    rounded-up bound reaches the incumbent.
    """
    clock = Clock(budget or Budget())
    integral_obj = _objective_is_integral(model)
    base = {v.name: (v.lb, v.ub) for v in model.variables}

    def prunable(bound: float, incumbent: float) -> bool:
        if integral_obj:
            return math.ceil(bound - INT_TOL) >= incumbent - INT_TOL
        return bound >= incumbent - 1e-9

    counter = itertools.count()
    root = lp_relax(model)
    clock.nodes = 1
    if root.status is LpStatus.INFEASIBLE:
        return SolveResult(Status.INFEASIBLE, None, nodes=1, wall_time=clock.elapsed())
    if root.status is LpStatus.UNBOUNDED:
        raise ValueError("MIP relaxation is unbounded")
    heap = [(root.objective, next(counter), {}, root)]
    best_obj, best_values = math.inf, None
    while heap:
        bound, _, fixes, sol = heapq.heappop(heap)
        if prunable(bound, best_obj):
            continue
        pick = _branch_var(model, sol.values)
        if pick is None:
            best_obj, best_values = sol.objective, sol.values
            continue
        if clock.exhausted():
            heapq.heappush(heap, (bound, next(counter), fixes, sol))
            break
        name, x = pick
        lb, ub = fixes.get(name, base[name])
        for child in ((lb, math.floor(x)), (math.ceil(x), ub)):
            if child[0] > child[1]:
                continue
            bounds = dict(fixes)
            bounds[name] = child
            res = lp_relax(model, bounds)
            clock.nodes += 1
            if res.status is not LpStatus.OPTIMAL:
                continue
            if not prunable(res.objective, best_obj):
                heapq.heappush(heap, (res.objective, next(counter), bounds, res))

    open_bounds = [b for b, *_ in heap if not prunable(b, best_obj)]
    if best_values is None:
        status = Status.BUDGET_EXHAUSTED if open_bounds else Status.INFEASIBLE
        return SolveResult(status, None, bound=min(open_bounds, default=None), nodes=clock.nodes, wall_time=clock.elapsed())
    if open_bounds:
        return SolveResult(
            Status.BUDGET_EXHAUSTED, best_obj, bound=min(open_bounds), nodes=clock.nodes,
            wall_time=clock.elapsed(), values=best_values,
        )
    return SolveResult(Status.OPTIMAL, best_obj, bound=best_obj, nodes=clock.nodes, wall_time=clock.elapsed(), values=best_values)
