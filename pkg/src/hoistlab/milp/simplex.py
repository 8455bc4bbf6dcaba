"""Dense bounded-variable primal simplex.

Every row ``a x (sense) rhs`` becomes ``a x - s = 0`` with a row-activity
column ``s`` whose bounds carry the sense. Columns keep their own bounds;
nonbasic columns sit at a bound, so no shifting or splitting is needed.

Phase 1 adds one artificial per row whose activity starts outside its
bounds and minimizes their sum. Afterwards the artificials are clamped to
[0, 0] and phase 2 minimizes the true objective from the same basis.

Pricing is Dantzig's largest reduced cost; after a run of degenerate pivots
the method switches to Bland's smallest-index rule until progress resumes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelIR, Sense

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
MAX_ITERATIONS = 1_000_000
REFACTOR_EVERY = 100
DEGENERATE_STREAK = 50


class LpStatus(enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


class SimplexError(RuntimeError):
    pass


@dataclass
class LpSolution:
    status: LpStatus
    objective: float | None = None
    values: dict[str, float] = field(default_factory=dict)
    iterations: int = 0


@dataclass
class StandardForm:
    """``A x - s = 0``, ``lo <= (x, s) <= hi``, minimize ``c x``."""

    names: list[str]
    A: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    c: np.ndarray


def standardize(model: ModelIR, bounds: dict[str, tuple[float, float]] | None = None) -> StandardForm:
    n, m = len(model.variables), len(model.constraints)
    A = np.zeros((m, n))
    lo = np.empty(n + m)
    hi = np.empty(n + m)
    for j, v in enumerate(model.variables):
        lo[j], hi[j] = (bounds or {}).get(v.name, (v.lb, v.ub))
    for i, row in enumerate(model.constraints):
        for name, coef in row.terms.items():
            A[i, model.index(name)] += coef
        if row.sense is Sense.LE:
            lo[n + i], hi[n + i] = -math.inf, row.rhs
        elif row.sense is Sense.GE:
            lo[n + i], hi[n + i] = row.rhs, math.inf
        else:
            lo[n + i] = hi[n + i] = row.rhs
    c = np.zeros(n)
    for name, coef in model.objective.items():
        c[model.index(name)] += coef
    return StandardForm([v.name for v in model.variables], A, lo, hi, c)


class _Tableau:
    def __init__(self, sf: StandardForm):
        m, n = sf.A.shape
        self.m, self.n = m, n
        self.lo = sf.lo.copy()
        self.hi = sf.hi.copy()
        # nonbasic start: a finite bound, else 0 for free columns
        x = np.where(np.isfinite(self.lo), self.lo, np.where(np.isfinite(self.hi), self.hi, 0.0))
        x = x[: n]
        activity = sf.A @ x if m else np.zeros(0)
        # columns: structurals, row activities, artificials (one per row, unused ones stay fixed at 0)
        self.full = np.hstack([sf.A, -np.eye(m), np.zeros((m, m))])
        self.lo = np.concatenate([self.lo, np.zeros(m)])
        self.hi = np.concatenate([self.hi, np.zeros(m)])
        self.x = np.concatenate([x, np.zeros(m), np.zeros(m)])
        self.basis = np.empty(m, dtype=int)
        for i in range(m):
            s = n + i
            lo_s, hi_s = self.lo[s], self.hi[s]
            if lo_s - FEAS_TOL <= activity[i] <= hi_s + FEAS_TOL:
                self.basis[i] = s
                self.x[s] = activity[i]
                continue
            target = lo_s if activity[i] < lo_s else hi_s
            self.x[s] = target
            a = n + m + i
            # a x - s + sigma * art = 0 with art = |target - activity| >= 0
            sigma = 1.0 if target > activity[i] else -1.0
            self.full[i, a] = sigma
            self.hi[a] = math.inf
            self.x[a] = abs(target - activity[i])
            self.basis[i] = a
        self.is_basic = np.zeros(self.full.shape[1], dtype=bool)
        self.is_basic[self.basis] = True
        self.T = np.empty_like(self.full)
        self.refactor()
        self.iterations = 0

    @property
    def artificial(self) -> slice:
        return slice(self.n + self.m, self.n + 2 * self.m)

    def refactor(self) -> None:
        if self.m == 0:
            self.T = self.full.copy()
            return
        B = self.full[:, self.basis]
        try:
            self.T = np.linalg.solve(B, self.full)
        except np.linalg.LinAlgError as exc:
            raise SimplexError("basis became singular") from exc
        # recompute basic values from nonbasic ones to shed drift
        nonbasic = ~self.is_basic
        rhs = -self.full[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basis] = np.linalg.solve(B, rhs)

    def run(self, cost: np.ndarray) -> LpStatus:
        bland = False
        streak = 0
        since_refactor = 0
        while True:
            if self.iterations >= MAX_ITERATIONS:
                raise SimplexError(
                    f"iteration cap {MAX_ITERATIONS} reached (rows={self.m}, columns={self.n})"
                )
            reduced = cost - cost[self.basis] @ self.T
            j, direction = self._price(reduced, bland)
            if j < 0:
                return LpStatus.OPTIMAL
            step, leave, leave_to_upper = self._ratio(j, direction, bland)
            if math.isinf(step):
                return LpStatus.UNBOUNDED
            self.iterations += 1
            col = self.T[:, j]
            self.x[j] += direction * step
            self.x[self.basis] -= direction * step * col
            if step <= 1e-12:
                streak += 1
                if streak >= DEGENERATE_STREAK:
                    bland = True
            else:
                streak = 0
                bland = False
            if leave < 0:
                continue  # bound flip of the entering column
            out = self.basis[leave]
            self.x[out] = self.hi[out] if leave_to_upper else self.lo[out]
            self._pivot(leave, j)
            since_refactor += 1
            if since_refactor >= REFACTOR_EVERY:
                self.refactor()
                since_refactor = 0

    def _price(self, reduced: np.ndarray, bland: bool) -> tuple[int, int]:
        movable = ~self.is_basic & (self.lo < self.hi)
        up = movable & (reduced < -OPT_TOL) & (self.x < self.hi - FEAS_TOL)
        down = movable & (reduced > OPT_TOL) & (self.x > self.lo + FEAS_TOL)
        score = np.where(up, -reduced, np.where(down, reduced, 0.0))
        candidates = np.flatnonzero(score > 0)
        if candidates.size == 0:
            return -1, 0
        j = int(candidates[0]) if bland else int(np.argmax(score))
        return j, (1 if up[j] else -1)

    def _ratio(self, j: int, direction: int, bland: bool) -> tuple[float, int, bool]:
        flip = self.hi[j] - self.lo[j]  # bound flip distance (may be inf)
        alphas = direction * self.T[:, j]
        xb = self.x[self.basis]
        lo, hi = self.lo[self.basis], self.hi[self.basis]
        limits = np.full(self.m, math.inf)
        falling = (alphas > PIVOT_TOL) & np.isfinite(lo)
        rising = (alphas < -PIVOT_TOL) & np.isfinite(hi)
        limits[falling] = np.maximum(xb[falling] - lo[falling], 0.0) / alphas[falling]
        limits[rising] = np.maximum(hi[rising] - xb[rising], 0.0) / -alphas[rising]
        if self.m == 0:
            return flip, -1, False
        step = limits.min()
        if not step < flip:
            return flip, -1, False
        ties = np.flatnonzero(limits <= step + 1e-12)
        if bland:
            r = int(ties[np.argmin(self.basis[ties])])
        else:
            r = int(ties[np.argmax(np.abs(alphas[ties]))])
        return float(limits[r]), r, bool(rising[r])

    def _pivot(self, r: int, j: int) -> None:
        pivot_row = self.T[r] / self.T[r, j]
        col = self.T[:, j].copy()
        col[r] = 0.0
        self.T -= np.outer(col, pivot_row)
        self.T[r] = pivot_row
        self.is_basic[self.basis[r]] = False
        self.basis[r] = j
        self.is_basic[j] = True


def simplex_solve(sf: StandardForm) -> tuple[LpStatus, np.ndarray | None, int]:
    """Solve a standardized LP; returns (status, structural values, iterations)."""
    if np.any(sf.lo > sf.hi + FEAS_TOL):
        return LpStatus.INFEASIBLE, None, 0
    tab = _Tableau(sf)
    total = tab.n + 2 * tab.m
    art = tab.artificial
    if np.any(tab.x[art] > 0):
        phase1 = np.zeros(total)
        phase1[art] = 1.0
        tab.run(phase1)
        tab.refactor()
        if tab.x[art].sum() > FEAS_TOL * max(1, tab.m):
            return LpStatus.INFEASIBLE, None, tab.iterations
    tab.hi[art] = 0.0
    tab.x[art] = np.minimum(tab.x[art], 0.0)
    cost = np.zeros(total)
    cost[: tab.n] = sf.c
    status = tab.run(cost)
    if status is LpStatus.UNBOUNDED:
        return status, None, tab.iterations
    tab.refactor()
    return LpStatus.OPTIMAL, tab.x[: tab.n].copy(), tab.iterations


def lp_relax(model: ModelIR, bounds: dict[str, tuple[float, float]] | None = None) -> LpSolution:
    """LP relaxation: integrality dropped, column bounds and fixings kept."""
    sf = standardize(model, bounds)
    status, x, iters = simplex_solve(sf)
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, iterations=iters)
    values = dict(zip(sf.names, (float(v) for v in x)))
    return LpSolution(status, float(sf.c @ x), values, iters)
