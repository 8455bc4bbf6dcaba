"""Cyclic schedules: feasibility checking, hoist trajectory and carrier counting.

The checker works directly on start times and the cyclic timeline. It never
looks at ordering variables, so it can serve as an independent referee for the
MIP encodings and the native solver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .core import INF, Instance, LoadConfig, Rules, is_inf, upper_bound


@dataclass(frozen=True)
class Schedule:
    cycle_time: int
    start: tuple[int, ...]
    # chosen period count per variable multitank operation; derived when absent
    periods: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "periods", dict(self.periods))

    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class MultiSchedule:
    """r-degree cycle; ``start[p][i]`` is the start of move i of copy p (0-based p)."""

    cycle_time: int
    start: tuple[tuple[int, ...], ...]

    @property
    def degree(self) -> int:
        return len(self.start)


class ScheduleError(ValueError):
    pass


def execution_order(sched: Schedule) -> tuple[int, ...]:
    """Moves sorted by start time. Two moves starting together is an error."""
    t = sched.start
    order = tuple(sorted(range(len(t)), key=lambda i: t[i]))
    for a, b in zip(order, order[1:]):
        if t[a] == t[b]:
            raise ScheduleError(f"moves {a} and {b} both start at {t[a]}")
    return order


def operation_start_times(inst: Instance, sched: Schedule) -> tuple[int, ...]:
    """Time within the cycle at which each operation's carrier is dropped into its tank.

    Operation 0 (loading) starts when the last move drops the previous
    carrier; operation i > 0 starts when move i - 1 ends.
    """
    n = inst.num_ops
    C = sched.cycle_time
    t = sched.start
    d = inst.move_duration
    out = [(t[n] + d[n]) % C]
    out += [(t[i - 1] + d[i - 1]) % C for i in range(1, n + 1)]
    return tuple(out)


def wraps(inst: Instance, sched: Schedule, i: int) -> bool:
    """Operation i is in process when the cycle starts."""
    t, d = sched.start, inst.move_duration
    return t[i] < t[i - 1] + d[i - 1]


def primitive_schedule(inst: Instance) -> Schedule:
    """One carrier at a time: each move follows its predecessor after exactly L_i."""
    t = [0]
    d, L = inst.move_duration, inst.soak_min
    for i in range(1, inst.num_ops + 1):
        t.append(t[-1] + d[i - 1] + L[i])
    return Schedule(upper_bound(inst), tuple(t))


# --- trajectory -----------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    op: int
    src: int
    dst: int
    start: int
    end: int


@dataclass(frozen=True)
class EmptyTravel:
    src: int
    dst: int
    start: int
    end: int


@dataclass(frozen=True)
class Wait:
    tank: int
    start: int
    end: int


Segment = Union[Move, EmptyTravel, Wait]


@dataclass(frozen=True)
class Trajectory:
    cycle_time: int
    segments: tuple[Segment, ...]

    def moves(self) -> list[Move]:
        return [s for s in self.segments if isinstance(s, Move)]


def build_trajectory(inst: Instance, sched: Schedule) -> Trajectory:
    """Hoist path over one cycle: each move, empty travel to the next pickup, then wait there."""
    C = sched.cycle_time
    t, d = sched.start, inst.move_duration
    n = inst.num_ops
    order = execution_order(sched)
    if len(t) != n + 1 or t[0] != 0:
        raise ScheduleError("schedule must give n + 1 start times with t_0 = 0")
    segments: list[Segment] = []
    for k, i in enumerate(order):
        src, dst = inst.tank_of[i], inst.tank_of[i + 1]
        segments.append(Move(i, src, dst, t[i], t[i] + d[i]))
        now = t[i] + d[i]
        if k + 1 < len(order):
            nxt = order[k + 1]
            target, due, to_tank = t[nxt], t[nxt], inst.tank_of[nxt]
        else:
            target, due, to_tank = C, C, inst.tank_of[0]
        travel = inst.travel[dst][to_tank]
        if travel:
            segments.append(EmptyTravel(dst, to_tank, now, now + travel))
            now += travel
        if now > due:
            raise ScheduleError(f"hoist reaches tank {to_tank} at {now}, after {due}")
        if due > now:
            segments.append(Wait(to_tank, now, target))
    return Trajectory(C, tuple(segments))


# --- checking ---------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    family: str
    indices: tuple
    slack: float
    message: str = ""

    def __str__(self) -> str:
        idx = ",".join(str(i) for i in self.indices)
        return f"{self.family} {idx} {self.slack:g}"


@dataclass(frozen=True)
class CheckReport:
    violations: tuple[Violation, ...]
    carriers: int | None = None
    periods: Mapping[int, int] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def families(self) -> set[str]:
        return {v.family for v in self.violations}

    def to_text(self) -> str:
        return "\n".join(str(v) for v in self.violations)


def _soak_windows(inst: Instance, sched: Schedule) -> tuple[list[Violation], dict[int, int]]:
    """Soak-time checks; returns violations and the period count used per multitank op."""
    C = sched.cycle_time
    t, d = sched.start, inst.move_duration
    L, U = inst.soak_min, inst.soak_max
    out: list[Violation] = []
    periods: dict[int, int] = {}
    for i in range(1, inst.num_ops + 1):
        raw = t[i] - (t[i - 1] + d[i - 1])
        wrap = raw < 0
        if i in inst.multitank:
            chosen = None
            forced = sched.periods.get(i)
            candidates = [forced] if forced is not None else list(inst.multitank_range(i))
            best_slack = -INF
            for m in candidates:
                soak = raw + (m if wrap else m - 1) * C
                slack = min(soak - L[i], U[i] - soak)
                if slack >= 0:
                    chosen = m
                    break
                best_slack = max(best_slack, slack)
            if chosen is None:
                out.append(Violation("multitank", (i,), best_slack, f"no period count fits operation {i}"))
            else:
                periods[i] = chosen
            continue
        soak = raw + C if wrap else raw
        if soak < L[i]:
            out.append(Violation("soak", (i,), soak - L[i], f"operation {i} soaks {soak} < {L[i]}"))
        if not is_inf(U[i]) and soak > U[i]:
            out.append(Violation("soak", (i,), U[i] - soak, f"operation {i} soaks {soak} > {U[i]}"))
    return out, periods


def _cyclic_intervals_meet(a0: int, a1: int, b0: int, b1: int, C: int) -> bool:
    """Closed intervals [a0, a1] and [b0, b1] on a circle of length C share a point.

    Interval ends may exceed C (the interval then wraps).
    """
    for shift in (-C, 0, C):
        if a0 <= b1 + shift and b0 + shift <= a1:
            return True
    return False


def _multifunction(inst: Instance, sched: Schedule) -> list[Violation]:
    C = sched.cycle_time
    t, d = sched.start, inst.move_duration
    out = []

    def occupancy(i: int) -> tuple[int, int]:
        begin = t[i - 1] + d[i - 1]
        end = t[i] if t[i] >= begin else t[i] + C
        return begin, end

    for i, j in inst.same_tank_pairs():
        a0, a1 = occupancy(i)
        b0, b1 = occupancy(j)
        if _cyclic_intervals_meet(a0, a1, b0, b1, C):
            gap = -min(abs(a1 - b0), abs(b1 - a0))
            out.append(Violation("multifunction", (i, j), gap, f"operations {i} and {j} overlap in tank {inst.tank_of[i]}"))
    return out


def _load(inst: Instance, sched: Schedule) -> list[Violation]:
    n = inst.num_ops
    C = sched.cycle_time
    t, d = sched.start, inst.move_duration
    L, U = inst.soak_min, inst.soak_max
    out = []
    if inst.load_config is LoadConfig.DISSOCIATED:
        need = max(L[0], L[n + 1])
        if C < need:
            out.append(Violation("load", (0, n + 1), C - need))
        cap = min(U[0], U[n + 1])
        if C > cap:
            out.append(Violation("load", (0, n + 1), cap - C))
    elif inst.load_config is LoadConfig.ASSOCIATED:
        gap = C - (t[n] + d[n])
        if gap < L[0] + L[n + 1]:
            out.append(Violation("load", (n, 0), gap - L[0] - L[n + 1]))
        if not is_inf(U[0]) and gap > U[0]:
            out.append(Violation("load", (n, 0), U[0] - gap))
    return out


def check_simple_cycle(inst: Instance, sched: Schedule, rules: Rules | None = None) -> CheckReport:
    """Evaluate every constraint family on a simple-cycle schedule."""
    rules = rules or Rules()
    inst = rules.apply(inst)
    n = inst.num_ops
    C = sched.cycle_time
    t, d = sched.start, inst.move_duration
    if len(t) != n + 1:
        return CheckReport((Violation("shape", (), -1, f"expected {n + 1} start times"),))
    out: list[Violation] = []
    if t[0] != 0:
        out.append(Violation("shape", (0,), -abs(t[0]), "move 0 must start at time 0"))
    for i in range(1, n + 1):
        if t[i] < 0:
            out.append(Violation("shape", (i,), t[i], f"move {i} starts before 0"))

    for i in range(n + 1):
        for j in range(n + 1):
            if i != j and t[i] <= t[j]:
                slack = t[j] - (t[i] + d[i] + inst.e(i + 1, j))
                if slack < 0:
                    out.append(Violation("travel", (i, j), slack))
    for i in range(n + 1):
        slack = C - (t[i] + d[i] + inst.e(i + 1, 0))
        if slack < 0:
            out.append(Violation("cycle", (i,), slack))
    if rules.restricted and n >= 1:
        last = max(range(n + 1), key=lambda i: t[i])
        finish = t[last] + d[last] + inst.e(last + 1, 0)
        if C != finish:
            out.append(Violation("cycle", (last,), finish - C, "cycle must end when the hoist returns"))

    soak, periods = _soak_windows(inst, sched)
    out += soak
    out += _load(inst, sched)
    if rules.multifunction:
        out += _multifunction(inst, sched)

    carriers = 1 + sum(1 for i in range(1, n + 1) if t[i] < t[i - 1] + d[i - 1])
    carriers += sum(m - 1 for m in periods.values())
    if inst.carrier_limit is not None and carriers > inst.carrier_limit:
        out.append(Violation("carrier", (), inst.carrier_limit - carriers))
    return CheckReport(tuple(out), carriers, periods)


def count_carriers(inst: Instance, sched: Schedule) -> int:
    """Carriers on the line: the one entering plus one per operation in process at time 0."""
    n = inst.num_ops
    count = 1 + sum(1 for i in range(1, n + 1) if wraps(inst, sched, i))
    if inst.multitank:
        _, periods = _soak_windows(inst, sched)
        for i in inst.multitank:
            m = periods.get(i, sched.periods.get(i, min(inst.multitank_range(i))))
            count += m - 1
    return count


def cyclic_shift_sum(inst: Instance, sched: Schedule, ops: Sequence[int]) -> int:
    """Left side of the cyclic-shift equation for operations sharing one tank.

    Counts, around the tuple (end of move i_1 - 1, start of move i_1, ...,
    start of move i_r), how many consecutive pairs appear in increasing time
    order. Only schedules that visit the tank in a cyclic shift of ``ops``
    reach ``2r - 1``; that is stricter than non-overlap.
    """
    t = sched.start

    def before(a: int, b: int) -> int:
        return 1 if t[a] < t[b] else 0

    r = len(ops)
    total = 0
    for p, i in enumerate(ops):
        total += before(i - 1, i)
        if p + 1 < r:
            total += before(i, ops[p + 1] - 1)
        else:
            total += 1 - before(ops[0] - 1, i)
    return total


def cyclic_shift_test(inst: Instance, sched: Schedule, ops: Sequence[int]) -> bool:
    return cyclic_shift_sum(inst, sched, ops) == 2 * len(ops) - 1


def shared_tank_groups(inst: Instance) -> list[tuple[int, ...]]:
    groups: dict[int, list[int]] = {}
    for i in range(1, inst.num_ops + 1):
        groups.setdefault(inst.tank_of[i], []).append(i)
    return [tuple(g) for g in groups.values() if len(g) > 1]


def report_lines(report: CheckReport) -> Iterable[str]:
    if report.feasible:
        yield f"FEASIBLE, carriers={report.carriers}"
    else:
        yield f"INFEASIBLE, violations={len(report.violations)}"
        yield from (str(v) for v in report.violations)


def schedule_to_dict(sched: Schedule | MultiSchedule) -> dict:
    if isinstance(sched, MultiSchedule):
        return {"cycle_time": sched.cycle_time, "degree": sched.degree, "start": [list(s) for s in sched.start]}
    doc = {"cycle_time": sched.cycle_time, "start": list(sched.start)}
    if sched.periods:
        doc["periods"] = {str(k): v for k, v in sorted(sched.periods.items())}
    return doc


def schedule_from_dict(doc: Mapping) -> Schedule | MultiSchedule:
    try:
        C = int(doc["cycle_time"])
        start = doc["start"]
        if start and isinstance(start[0], list):
            return MultiSchedule(C, tuple(tuple(int(x) for x in row) for row in start))
        periods = {int(k): int(v) for k, v in doc.get("periods", {}).items()}
        return Schedule(C, tuple(int(x) for x in start), periods)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ScheduleError(f"malformed schedule document: {exc}") from None


def save_schedule(sched: Schedule | MultiSchedule, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schedule_to_dict(sched), fh)
        fh.write("\n")


def load_schedule(path) -> Schedule | MultiSchedule:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScheduleError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return schedule_from_dict(doc)
