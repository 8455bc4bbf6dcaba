"""Instance model, validation, station conversion and analytic cycle-time bounds.

Times are integers. The unbounded soak maximum is represented by ``INF``
(``math.inf``); it is never replaced by a large finite number.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping

INF = math.inf


def is_inf(value: float) -> bool:
    return value == INF


class LoadConfig(enum.Enum):
    """How the load and unload stations interact.

    ``NONE`` switches the load/unload time windows off entirely, which is the
    setting used when comparing formulations on benchmark data.
    """

    DISSOCIATED = "dissociated"
    ASSOCIATED = "associated"
    NONE = "none"

    @classmethod
    def parse(cls, text: str) -> "LoadConfig":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown load config {text!r}") from None


@dataclass(frozen=True)
class MultiTank:
    """Bottleneck operation soaking for several cycles.

    ``m`` fixes the number of periods; ``None`` lets the solver choose any
    ``1 <= m <= cap``.
    """

    m: int | None = None


@dataclass(frozen=True)
class Instance:
    num_tanks: int
    tank_of: tuple[int, ...]
    move_duration: tuple[int, ...]
    soak_min: tuple[int, ...]
    soak_max: tuple[float, ...]
    travel: tuple[tuple[int, ...], ...]
    load_config: LoadConfig = LoadConfig.DISSOCIATED
    tank_capacity: Mapping[int, int] = field(default_factory=dict)
    multitank: Mapping[int, MultiTank] = field(default_factory=dict)
    carrier_limit: int | None = None
    name: str = ""
    scale: int = 1
    # set by to_dissociated: the last tank is the load station seen a second time
    merged_unload: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "tank_of", tuple(int(s) for s in self.tank_of))
        object.__setattr__(self, "move_duration", tuple(int(d) for d in self.move_duration))
        object.__setattr__(self, "soak_min", tuple(int(v) for v in self.soak_min))
        object.__setattr__(
            self, "soak_max", tuple(INF if is_inf(v) else int(v) for v in self.soak_max)
        )
        object.__setattr__(self, "travel", tuple(tuple(int(x) for x in row) for row in self.travel))
        object.__setattr__(self, "tank_capacity", dict(self.tank_capacity))
        object.__setattr__(self, "multitank", dict(self.multitank))

    @property
    def num_ops(self) -> int:
        return len(self.tank_of) - 2

    def e(self, i: int, j: int) -> int:
        """Empty travel time from the tank of operation i to the tank of operation j."""
        return self.travel[self.tank_of[i]][self.tank_of[j]]

    def capacity(self, tank: int) -> int:
        return self.tank_capacity.get(tank, 1)

    def multitank_range(self, i: int) -> range:
        """Admissible period counts m for operation i (just ``range(1, 2)`` if not multitank)."""
        spec = self.multitank.get(i)
        if spec is None:
            return range(1, 2)
        if spec.m is not None:
            return range(spec.m, spec.m + 1)
        return range(1, self.capacity(self.tank_of[i]) + 1)

    def same_tank_pairs(self) -> list[tuple[int, int]]:
        """Soaking operations i < j sharing a single-capacity tank (j > i + 1)."""
        n = self.num_ops
        pairs = []
        for i in range(1, n + 1):
            for j in range(i + 2, n + 1):
                if self.tank_of[i] == self.tank_of[j] and i not in self.multitank and j not in self.multitank:
                    pairs.append((i, j))
        return pairs

    @property
    def associated_geometry(self) -> bool:
        return self.tank_of[-1] == self.tank_of[0]


def validate_instance(inst: Instance) -> list[str]:
    """Return the list of violated invariants; an empty list means valid."""
    problems: list[str] = []
    n = inst.num_ops
    N = inst.num_tanks
    if n < 0:
        return ["tank_of must list at least the load and unload operations"]
    if len(inst.move_duration) != n + 1:
        problems.append(f"move_duration has {len(inst.move_duration)} entries, expected {n + 1}")
    for name, seq in (("soak_min", inst.soak_min), ("soak_max", inst.soak_max)):
        if len(seq) != n + 2:
            problems.append(f"{name} has {len(seq)} entries, expected {n + 2}")
    if problems:
        return problems

    size = N + 1 if inst.associated_geometry else N + 2
    if len(inst.travel) != size or any(len(row) != size for row in inst.travel):
        problems.append(f"travel matrix must be {size}x{size}")
        return problems
    tr = inst.travel
    for a in range(size):
        if tr[a][a] != 0:
            problems.append(f"travel diagonal nonzero at tank {a}")
        for b in range(size):
            if tr[a][b] < 0:
                problems.append(f"negative travel time {a}->{b}")
            if b > a and tr[a][b] != tr[b][a]:
                problems.append(f"travel not symmetric between tanks {a} and {b}: {tr[a][b]} vs {tr[b][a]}")
    for a in range(size):
        for b in range(size):
            for c in range(size):
                if tr[a][c] > tr[a][b] + tr[b][c]:
                    problems.append(f"triangle inequality violated for tanks {a},{b},{c}")

    if inst.tank_of[0] != 0:
        problems.append("operation 0 must use the load station (tank 0)")
    if inst.tank_of[-1] not in (0, N + 1):
        problems.append(f"unload operation must use tank 0 or {N + 1}")
    for i in range(1, n + 1):
        if not 1 <= inst.tank_of[i] <= N:
            problems.append(f"operation {i} uses tank {inst.tank_of[i]} outside 1..{N}")
    if problems:
        return problems
    for i in range(n + 1):
        if inst.tank_of[i] == inst.tank_of[i + 1]:
            problems.append(f"operations {i} and {i + 1} use the same tank")
        if inst.move_duration[i] < 0:
            problems.append(f"negative move duration d_{i}")
        elif inst.move_duration[i] < inst.e(i, i + 1):
            problems.append(f"move {i} shorter than loaded travel ({inst.move_duration[i]} < {inst.e(i, i + 1)})")
    for i in range(n + 2):
        if inst.soak_min[i] < 0:
            problems.append(f"negative soak minimum L_{i}")
        if inst.soak_min[i] > inst.soak_max[i]:
            problems.append(f"soak window empty for operation {i}")
    for tank, cap in inst.tank_capacity.items():
        if cap < 1:
            problems.append(f"tank {tank} has capacity {cap} < 1")
    for i, spec in inst.multitank.items():
        if not 1 <= i <= n:
            problems.append(f"multitank spec on non-soaking operation {i}")
            continue
        cap = inst.capacity(inst.tank_of[i])
        if spec.m is not None and not 1 <= spec.m <= cap:
            problems.append(f"multitank m={spec.m} for operation {i} exceeds capacity {cap}")
    if inst.carrier_limit is not None and inst.carrier_limit < 1:
        problems.append("carrier limit must be at least 1")
    return problems


def to_dissociated(inst: Instance) -> Instance:
    """Give the unload operation its own zero-distance copy of the load station."""
    if not inst.associated_geometry:
        raise ValueError("instance already has a separate unload station")
    N = inst.num_tanks
    old = [list(row) for row in inst.travel]
    size = len(old)
    if size != N + 1:
        raise ValueError(f"associated instance needs a {N + 1}x{N + 1} travel matrix")
    new = [row + [row[0]] for row in old]
    new.append(list(old[0]) + [0])
    tank_of = inst.tank_of[:-1] + (N + 1,)
    return replace(inst, tank_of=tank_of, travel=tuple(tuple(r) for r in new), merged_unload=True)


def dissociated(inst: Instance) -> Instance:
    return to_dissociated(inst) if inst.associated_geometry else inst


def upper_bound(inst: Instance) -> int:
    """Cycle time of the primitive schedule that processes one carrier at a time."""
    n = inst.num_ops
    d, L = inst.move_duration, inst.soak_min
    ub = d[0] + sum(L[i] + d[i] for i in range(1, n + 1))
    tail = inst.e(n + 1, 0)
    if inst.load_config is LoadConfig.ASSOCIATED:
        tail = max(tail, L[0] + L[n + 1])
    ub += tail
    for i in inst.multitank:
        m = max(inst.multitank_range(i))
        ub = max(ub, -(-L[i] // m))
    return ub


def lower_bound(inst: Instance) -> int:
    n = inst.num_ops
    d, L = inst.move_duration, inst.soak_min
    lb = min(inst.e(i + 1, 0) for i in range(n + 1)) + sum(d)
    for i in range(1, n + 1):
        if i in inst.multitank:
            m = max(inst.multitank_range(i))
            lb = max(lb, -(-L[i] // m))
        else:
            lb = max(lb, d[i - 1] + L[i] + d[i] + inst.e(i + 1, i - 1))
    if inst.load_config is LoadConfig.DISSOCIATED:
        lb = max(lb, L[0], L[n + 1])
    return lb


def big_m(inst: Instance) -> int:
    return upper_bound(inst)


@dataclass(frozen=True)
class BoundPair:
    lb: int
    ub: int


def bounds(inst: Instance) -> BoundPair:
    return BoundPair(lower_bound(inst), upper_bound(inst))


@dataclass(frozen=True)
class Rules:
    """Problem options shared by the checker, the native solver and the model builders.

    ``None`` fields fall back to the instance's own setting.
    """

    load_config: LoadConfig | None = None
    multifunction: bool = True
    carrier_limit: int | None = None
    restricted: bool = False
    multitank: Mapping[int, MultiTank] | None = None

    def apply(self, inst: Instance) -> Instance:
        """Fold the overrides into a copy of ``inst``."""
        changes: dict = {}
        if self.load_config is not None:
            changes["load_config"] = self.load_config
        if self.carrier_limit is not None:
            changes["carrier_limit"] = self.carrier_limit
        if self.multitank is not None:
            changes["multitank"] = dict(self.multitank)
        return replace(inst, **changes) if changes else inst

