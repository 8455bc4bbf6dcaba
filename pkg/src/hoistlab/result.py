"""Outcome types shared by the native solver and the MIP branch-and-bound."""

from __future__ import annotations

import enum
import os
import time
from dataclasses import dataclass, field
from typing import Any, Mapping


class Status(enum.Enum):
    OPTIMAL = "OPTIMAL"
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"


@dataclass(frozen=True)
class Budget:
    seconds: float = 60.0
    nodes: int = 10_000_000

    @classmethod
    def from_env(cls, default: float = 60.0) -> "Budget":
        raw = os.environ.get("HOISTLAB_BUDGET_SECS")
        return cls(seconds=float(raw) if raw else default)


class Clock:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.started = time.perf_counter()
        self.nodes = 0

    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def exhausted(self) -> bool:
        return self.nodes >= self.budget.nodes or self.elapsed() >= self.budget.seconds


@dataclass
class SolveResult:
    status: Status
    objective: float | None
    certificate: Any = None
    bound: float | None = None
    nodes: int = 0
    wall_time: float = 0.0
    values: Mapping[str, float] = field(default_factory=dict)
    orders_examined: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL
