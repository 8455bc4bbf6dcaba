"""Exact native optimizer: branch-and-bound over move orders.

For a complete move order every constraint family becomes a difference
constraint in (t, C), so the minimum cycle time of that order is found by
longest-path computations (see ``diffcons``). The search appends one move at
a time to the order prefix; at each node a relaxation keeps only the
constraints whose orientation is already decided and bounds C from below.

The same engine covers r-degree cycles: moves become (copy, operation) pairs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import Instance, LoadConfig, Rules, dissociated, is_inf, lower_bound, upper_bound
from .diffcons import Edge, min_feasible_cycle, min_feasible_cycle_bisect
from .result import Budget, Clock, SolveResult, Status
from .schedule import MultiSchedule, Schedule

MAX_BRUTE_FORCE_OPS = 9


@dataclass(frozen=True)
class Soak:
    """Move ``b`` picks up the carrier that move ``a`` dropped."""

    a: int
    b: int
    lo: int  # d_a + L
    hi: float  # d_a + U (may be infinite)
    periods: range
    op: int


@dataclass(frozen=True)
class Interval:
    """Station occupancy anchored at a move: [t_anchor + start, t_anchor + end]."""

    anchor: int
    start: int
    end: int


@dataclass
class CyclicProblem:
    """Moves, their timing data and the order-dependent constraint families."""

    num_moves: int
    labels: list[tuple[int, int]]
    dur: list[int]
    ret: list[int]
    step: list[list[int]]
    soaks: list[Soak]
    patterns: list[tuple[int, int, int, int]]
    interval_pairs: list[tuple[Interval, Interval]]
    static_edges: list[Edge]
    precedence: list[tuple[int, int]]
    c_lo: int
    c_hi: int
    restricted: bool = False
    carrier_limit: int | None = None
    base_carriers: int = 1
    preds: list[list[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.preds = [[] for _ in range(self.num_moves)]
        for a, b in self.precedence:
            self.preds[b].append(a)


def build_problem(inst: Instance, rules: Rules | None = None, degree: int = 1) -> CyclicProblem:
    rules = rules or Rules()
    inst = rules.apply(dissociated(inst))
    n, r = inst.num_ops, degree
    if r > 1 and inst.multitank:
        raise ValueError("multitank operations are only supported for simple cycles")
    d, L, U = inst.move_duration, inst.soak_min, inst.soak_max

    def v(p: int, i: int) -> int:
        return p * (n + 1) + i

    labels = [(p, i) for p in range(r) for i in range(n + 1)]
    K = len(labels)
    dur = [d[i] for _, i in labels]
    ret = [inst.e(i + 1, 0) for _, i in labels]
    # travel rows: consecutive moves need d + e time; at least 1 keeps start times distinct
    step = [[max(d[i] + inst.e(i + 1, j), 1) for _, j in labels] for _, i in labels]

    soaks = []
    for p in range(r):
        for i in range(1, n + 1):
            hi = math.inf if is_inf(U[i]) else d[i - 1] + U[i]
            soaks.append(Soak(v(p, i - 1), v(p, i), d[i - 1] + L[i], hi, inst.multitank_range(i), i))

    patterns = []
    if rules.multifunction:
        for i, j in inst.same_tank_pairs():
            for p in range(r):
                patterns.append((v(p, i - 1), v(p, i), v(p, j - 1), v(p, j)))
            for p, q in itertools.combinations(range(r), 2):
                patterns.append((v(p, i - 1), v(p, i), v(q, j - 1), v(q, j)))
                patterns.append((v(p, j - 1), v(p, j), v(q, i - 1), v(q, i)))
    for i in range(1, n + 1):
        for p, q in itertools.combinations(range(r), 2):
            patterns.append((v(p, i - 1), v(p, i), v(q, i - 1), v(q, i)))

    c_lo = lower_bound(inst) if r == 1 else r * sum(d) + min(ret)
    c_hi = upper_bound(inst) * r
    interval_pairs: list[tuple[Interval, Interval]] = []
    static_edges: list[Edge] = []
    cfg = inst.load_config
    if cfg is not LoadConfig.NONE:
        loads = [Interval(v(p, 0), -L[0], 0) for p in range(r)]
        unloads = [Interval(v(p, n), d[n], d[n] + L[n + 1]) for p in range(r)]
        c_lo = max(c_lo, L[0], L[n + 1])
        interval_pairs += list(itertools.combinations(loads, 2))
        interval_pairs += list(itertools.combinations(unloads, 2))
        if cfg is LoadConfig.DISSOCIATED:
            cap = min(U[0], U[n + 1])
            if not is_inf(cap):
                c_hi = min(c_hi, int(cap))
        else:
            interval_pairs += [(u, l) for u in unloads for l in loads]
            if r == 1 and not is_inf(U[0]):
                # C <= t_n + d_n + U_0
                static_edges.append((0, v(0, n), -d[n] - int(U[0]), 1))

    precedence = [(v(p, 0), v(p + 1, 0)) for p in range(r - 1)]
    return CyclicProblem(
        num_moves=K,
        labels=labels,
        dur=dur,
        ret=ret,
        step=step,
        soaks=soaks,
        patterns=patterns,
        interval_pairs=interval_pairs,
        static_edges=static_edges,
        precedence=precedence,
        c_lo=c_lo,
        c_hi=c_hi,
        restricted=rules.restricted,
        carrier_limit=inst.carrier_limit,
        base_carriers=r,
    )


# --- order evaluation ---------------------------------------------------------------

UNKNOWN = None


class OrderState:
    """Positions of decided moves; every undecided move comes after all decided ones."""

    def __init__(self, num_moves: int, prefix: Sequence[int]):
        self.pos = [-1] * num_moves
        for k, m in enumerate(prefix):
            self.pos[m] = k

    def before(self, a: int, b: int) -> bool | None:
        pa, pb = self.pos[a], self.pos[b]
        if pa >= 0 and pb >= 0:
            return pa < pb
        if pa >= 0:
            return True
        if pb >= 0:
            return False
        return UNKNOWN


def _interval_edges(first: Interval, second: Interval) -> list[Edge]:
    # first then second, and second ends before first starts one cycle later
    return [
        (first.anchor, second.anchor, first.end - second.start, 0),
        (second.anchor, first.anchor, second.end - first.start, -1),
    ]


def _pattern_ok(state: OrderState, pattern: tuple[int, int, int, int]) -> bool | None:
    a, b, c, d = pattern
    ys = (state.before(a, b), state.before(b, c), state.before(c, d), state.before(a, d))
    if any(y is UNKNOWN for y in ys):
        return UNKNOWN
    return ys[0] + ys[1] + ys[2] + (1 - ys[3]) == 3


def _relaxed_edges(
    prob: CyclicProblem, prefix: Sequence[int], state: OrderState, choice: dict[int, int] | None = None
) -> list[Edge] | None:
    """Edges valid for every completion of ``prefix``; ``None`` if the prefix is already dead.

    ``choice`` pins the period count of multitank soaks (keyed by operation);
    without it their rows are relaxed over the admissible range.
    """
    edges: list[Edge] = list(prob.static_edges)
    for a, b in zip(prefix, prefix[1:]):
        edges.append((a, b, prob.step[a][b], 0))
    last = prefix[-1]
    undecided = [m for m in range(prob.num_moves) if state.pos[m] < 0]
    for u in undecided:
        edges.append((last, u, prob.step[last][u], 0))
    if undecided:
        work = prob.dur[last] + sum(prob.dur[u] for u in undecided) + min(prob.ret[u] for u in undecided)
        edges.append((last, 0, work, -1))
    for m in range(prob.num_moves):
        edges.append((m, 0, prob.dur[m] + prob.ret[m], -1))

    wraps = 0
    extra = 0
    for s in prob.soaks:
        forward = state.before(s.a, s.b)
        if choice and s.op in choice:
            m_lo = m_hi = choice[s.op]
        else:
            m_lo, m_hi = s.periods[0], s.periods[-1]
        extra += m_lo - 1
        if forward is UNKNOWN:
            k_low, k_up = m_hi, m_lo - 1
        elif forward:
            k_low, k_up = m_hi - 1, m_lo - 1
        else:
            wraps += 1
            k_low, k_up = m_hi, m_lo
        edges.append((s.a, s.b, s.lo, -k_low))
        if not math.isinf(s.hi):
            edges.append((s.b, s.a, -int(s.hi), k_up))
    if prob.carrier_limit is not None and prob.base_carriers + wraps + extra > prob.carrier_limit:
        return None
    for first, second in prob.interval_pairs:
        order = state.before(first.anchor, second.anchor)
        if order is True:
            edges += _interval_edges(first, second)
        elif order is False:
            edges += _interval_edges(second, first)
    for pattern in prob.patterns:
        if _pattern_ok(state, pattern) is False:
            return None
    return edges


def _exact_edge_sets(prob: CyclicProblem, order: Sequence[int]) -> Iterable[tuple[list[Edge], dict[int, int]]]:
    """Difference constraints of a complete order, one set per multitank period choice."""
    state = OrderState(prob.num_moves, order)
    multi = [s for s in prob.soaks if len(s.periods) > 1]
    last = order[-1]
    for combo in itertools.product(*(s.periods for s in multi)):
        choice = {s.op: m for s, m in zip(multi, combo)}
        edges = _relaxed_edges(prob, order, state, choice)
        if edges is None:
            continue
        if prob.restricted:
            edges.append((0, last, -(prob.dur[last] + prob.ret[last]), 1))
        yield edges, choice


def _evaluate_order(prob: CyclicProblem, order: Sequence[int], lo: int, hi: int, bisect: bool = False):
    """Best (C, start times, periods) for a complete order with C in [lo, hi], or None."""
    search = min_feasible_cycle_bisect if bisect else min_feasible_cycle
    best = None
    for edges, periods in _exact_edge_sets(prob, order):
        found = search(prob.num_moves, edges, max(lo, prob.c_lo), hi)
        if found is not None and (best is None or found[0] < best[0]):
            best = (found[0], found[1], periods)
            hi = found[0] - 1
    return best


def _as_schedule(prob: CyclicProblem, C: int, times: Sequence[int], periods: dict[int, int]):
    if prob.base_carriers == 1:
        return Schedule(C, tuple(times), periods)
    per = prob.num_moves // prob.base_carriers
    return MultiSchedule(C, tuple(tuple(times[p * per:(p + 1) * per]) for p in range(prob.base_carriers)))


def _check_order(prob: CyclicProblem, order: Sequence[int]) -> None:
    if sorted(order) != list(range(prob.num_moves)) or order[0] != 0:
        raise ValueError("order must be a permutation of all moves starting with move 0")


def feasible_at_C(inst: Instance, order: Sequence[int], C: int, rules: Rules | None = None):
    """Whether the move order admits cycle time exactly C; returns (ok, start times or None)."""
    prob = build_problem(inst, rules)
    _check_order(prob, order)
    found = _evaluate_order(prob, order, C, C)
    if found is None:
        return False, None
    return True, tuple(found[1])


def min_cycle_schedule(inst: Instance, order: Sequence[int], rules: Rules | None = None, method: str = "jump"):
    prob = build_problem(inst, rules)
    _check_order(prob, order)
    found = _evaluate_order(prob, order, prob.c_lo, prob.c_hi, bisect=(method == "bisect"))
    if found is None:
        return None
    return _as_schedule(prob, *found)


def min_cycle_for_order(inst: Instance, order: Sequence[int], rules: Rules | None = None, method: str = "jump") -> int | None:
    """Minimal integer cycle time for a fixed move order; ``None`` when no C in range works."""
    sched = min_cycle_schedule(inst, order, rules, method)
    return None if sched is None else sched.cycle_time


# --- search ------------------------------------------------------------------------


class _Search:
    def __init__(self, prob: CyclicProblem, budget: Budget):
        self.prob = prob
        self.clock = Clock(budget)
        self.best: tuple[int, list[int], dict[int, int]] | None = None
        self.stopped = False

    @property
    def incumbent(self) -> int:
        return self.best[0] if self.best else self.prob.c_hi + 1

    def offer(self, order: Sequence[int]) -> None:
        found = _evaluate_order(self.prob, order, self.prob.c_lo, self.incumbent - 1)
        if found is not None:
            self.best = found

    def children(self, prefix: list[int], state: OrderState, times: list[int]) -> list[int]:
        placed = set(prefix)
        cands = [
            m
            for m in range(self.prob.num_moves)
            if state.pos[m] < 0 and all(p in placed for p in self.prob.preds[m])
        ]
        return sorted(cands, key=lambda m: (times[m], m))

    def dive(self, prefix: list[int], lo: int) -> None:
        if self.stopped:
            return
        self.clock.nodes += 1
        if self.clock.exhausted():
            self.stopped = True
            return
        prob = self.prob
        if len(prefix) == prob.num_moves:
            found = _evaluate_order(prob, prefix, lo, self.incumbent - 1)
            if found is not None:
                self.best = found
            return
        state = OrderState(prob.num_moves, prefix)
        edges = _relaxed_edges(prob, prefix, state)
        if edges is None:
            return
        found = min_feasible_cycle(prob.num_moves, edges, lo, self.incumbent - 1)
        if found is None:
            return
        bound, times = found
        for m in self.children(prefix, state, times):
            if bound >= self.incumbent:
                return
            prefix.append(m)
            self.dive(prefix, bound)
            prefix.pop()


def _primitive_order(prob: CyclicProblem) -> list[int]:
    return list(range(prob.num_moves))


def _search(prob: CyclicProblem, budget: Budget | None) -> SolveResult:
    search = _Search(prob, budget or Budget())
    search.offer(_primitive_order(prob))
    root = _relaxed_edges(prob, [0], OrderState(prob.num_moves, [0]))
    root_found = None if root is None else min_feasible_cycle(prob.num_moves, root, prob.c_lo, prob.c_hi)
    root_bound = root_found[0] if root_found else None
    if root_found is not None:
        search.dive([0], root_bound)
    clock = search.clock
    if search.stopped:
        status = Status.BUDGET_EXHAUSTED
    elif search.best is None:
        status = Status.INFEASIBLE
    else:
        status = Status.OPTIMAL
    if search.best is None:
        return SolveResult(status, None, None, root_bound, clock.nodes, clock.elapsed())
    C, times, periods = search.best
    bound = C if status is Status.OPTIMAL else root_bound
    return SolveResult(status, C, _as_schedule(prob, C, times, periods), bound, clock.nodes, clock.elapsed())


def solve_simple_cycle(inst: Instance, rules: Rules | None = None, budget: Budget | None = None) -> SolveResult:
    """Minimum cycle time of a simple cycle, with a certificate schedule."""
    return _search(build_problem(inst, rules), budget)


def solve_multidegree(inst: Instance, r: int, rules: Rules | None = None, budget: Budget | None = None) -> SolveResult:
    """Minimum cycle time when r carriers enter and leave the line per cycle."""
    if r < 1:
        raise ValueError("degree must be at least 1")
    return _search(build_problem(inst, rules, degree=r), budget)


def brute_force(inst: Instance, rules: Rules | None = None) -> SolveResult:
    """Try every order of moves 1..n; exact by exhaustion, for small n only."""
    prob = build_problem(inst, rules)
    n = prob.num_moves - 1
    if n > MAX_BRUTE_FORCE_OPS:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_FORCE_OPS}")
    clock = Clock(Budget(seconds=math.inf, nodes=math.inf))
    best = None
    count = 0
    for tail in itertools.permutations(range(1, n + 1)):
        count += 1
        found = _evaluate_order(prob, (0,) + tail, prob.c_lo, prob.c_hi, bisect=True)
        if found is not None and (best is None or found[0] < best[0]):
            best = found
    if best is None:
        return SolveResult(Status.INFEASIBLE, None, nodes=count, wall_time=clock.elapsed(), orders_examined=count)
    C, times, periods = best
    return SolveResult(
        Status.OPTIMAL, C, _as_schedule(prob, C, times, periods), C, count, clock.elapsed(), orders_examined=count
    )
