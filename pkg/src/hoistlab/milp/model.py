"""Solver-agnostic linear model: typed columns, named rows, a minimized objective."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class VarKind(enum.Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"
    INTEGER = "integer"


class Sense(enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


@dataclass
class Variable:
    name: str
    kind: VarKind = VarKind.CONTINUOUS
    lb: float = 0.0
    ub: float = math.inf

    @property
    def fixed(self) -> bool:
        return self.lb == self.ub

    @property
    def integral(self) -> bool:
        return self.kind is not VarKind.CONTINUOUS


@dataclass
class Constraint:
    name: str
    terms: dict[str, float]
    sense: Sense
    rhs: float
    family: str = ""

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.terms.items())

    def violation(self, values: Mapping[str, float]) -> float:
        lhs = self.activity(values)
        if self.sense is Sense.LE:
            return max(0.0, lhs - self.rhs)
        if self.sense is Sense.GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


class Lin:
    """Small linear expression: ``terms`` plus a constant."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Mapping[str, float] | None = None, const: float = 0.0):
        self.terms: dict[str, float] = dict(terms or {})
        self.const = const

    @classmethod
    def var(cls, name: str, coef: float = 1.0) -> "Lin":
        return cls({name: coef})

    def copy(self) -> "Lin":
        return Lin(self.terms, self.const)

    def __add__(self, other: "Lin | float") -> "Lin":
        out = self.copy()
        if isinstance(other, Lin):
            for v, c in other.terms.items():
                out.terms[v] = out.terms.get(v, 0.0) + c
            out.const += other.const
        else:
            out.const += other
        return out

    __radd__ = __add__

    def __neg__(self) -> "Lin":
        return Lin({v: -c for v, c in self.terms.items()}, -self.const)

    def __sub__(self, other: "Lin | float") -> "Lin":
        return self + (-other if isinstance(other, Lin) else -other)

    def __rsub__(self, other: float) -> "Lin":
        return (-self) + other

    def __mul__(self, k: float) -> "Lin":
        return Lin({v: c * k for v, c in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    def cleaned(self) -> dict[str, float]:
        return {v: c for v, c in self.terms.items() if c != 0}


@dataclass
class ModelIR:
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, float] = field(default_factory=dict)
    metadata: dict[str, str] = field(default_factory=dict)
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def add_var(self, name: str, kind: VarKind = VarKind.CONTINUOUS, lb: float = 0.0, ub: float = math.inf) -> str:
        if name in self._index:
            raise ValueError(f"duplicate variable {name!r}")
        if kind is VarKind.BINARY:
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        self._index[name] = len(self.variables)
        self.variables.append(Variable(name, kind, lb, ub))
        return name

    def var(self, name: str) -> Variable:
        return self.variables[self._index[name]]

    def has_var(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        return self._index[name]

    def add(self, name: str, lhs: Lin, sense: Sense | str, rhs: Lin | float = 0.0, family: str = "") -> Constraint | None:
        """Add ``lhs sense rhs``; constants move right. A row without variables is checked, not stored."""
        sense = Sense(sense) if isinstance(sense, str) else sense
        expr = lhs - rhs if isinstance(rhs, Lin) else lhs - Lin(const=rhs)
        terms = expr.cleaned()
        bound = -expr.const
        if not terms:
            ok = {Sense.LE: 0 <= bound, Sense.GE: 0 >= bound, Sense.EQ: bound == 0}[sense]
            if not ok:
                raise ValueError(f"row {name} is constant and violated")
            return None
        for v in terms:
            if v not in self._index:
                raise KeyError(f"row {name} references undeclared variable {v!r}")
        row = Constraint(name, terms, sense, bound, family)
        self.constraints.append(row)
        return row

    def minimize(self, expr: Lin) -> None:
        self.objective = expr.cleaned()

    def row(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)

    def rows(self, family: str) -> list[Constraint]:
        return [c for c in self.constraints if c.family == family]

    def family_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.constraints:
            counts[c.family] = counts.get(c.family, 0) + 1
        return counts

    @property
    def defects(self) -> list[str]:
        raw = self.metadata.get("defects", "")
        return [d for d in raw.split(",") if d]

    def flag_defect(self, label: str) -> None:
        if label not in self.defects:
            self.metadata["defects"] = ",".join(self.defects + [label])

    def binaries(self) -> list[str]:
        return [v.name for v in self.variables if v.kind is VarKind.BINARY]

    def integer_vars(self) -> list[str]:
        return [v.name for v in self.variables if v.integral]

    def max_violation(self, values: Mapping[str, float]) -> float:
        worst = 0.0
        for v in self.variables:
            x = values[v.name]
            worst = max(worst, v.lb - x, x - v.ub)
        for c in self.constraints:
            worst = max(worst, c.violation(values))
        return worst

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.objective.items())

    def validate(self) -> list[str]:
        problems = []
        seen = set()
        for v in self.variables:
            if v.name in seen:
                problems.append(f"duplicate variable {v.name}")
            seen.add(v.name)
            if v.kind is VarKind.BINARY and (v.lb < 0 or v.ub > 1):
                problems.append(f"binary {v.name} has bounds outside [0, 1]")
            if v.lb > v.ub:
                problems.append(f"variable {v.name} has empty bounds")
        for c in self.constraints:
            for name in c.terms:
                if name not in seen:
                    problems.append(f"row {c.name} references undeclared {name}")
        for name in self.objective:
            if name not in seen:
                problems.append(f"objective references undeclared {name}")
        return problems

    def relaxed(self) -> "ModelIR":
        """Copy with every integer column made continuous (bounds kept)."""
        out = ModelIR(
            [Variable(v.name, VarKind.CONTINUOUS, v.lb, v.ub) for v in self.variables],
            list(self.constraints),
            dict(self.objective),
            dict(self.metadata),
        )
        out._index = dict(self._index)
        return out

    def with_bounds(self, changes: Mapping[str, tuple[float, float]]) -> "ModelIR":
        out = ModelIR(
            [Variable(v.name, v.kind, *changes.get(v.name, (v.lb, v.ub))) for v in self.variables],
            self.constraints,
            self.objective,
            self.metadata,
        )
        out._index = self._index
        return out


def same_model(a: ModelIR, b: ModelIR, tol: float = 1e-12) -> bool:
    """Structural equality used by round-trip tests."""
    if [(v.name, v.kind, v.lb, v.ub) for v in a.variables] != [(v.name, v.kind, v.lb, v.ub) for v in b.variables]:
        return False
    if len(a.constraints) != len(b.constraints) or a.metadata != b.metadata:
        return False
    if not _same_terms(a.objective, b.objective, tol):
        return False
    for x, y in zip(a.constraints, b.constraints):
        if x.name != y.name or x.sense is not y.sense or abs(x.rhs - y.rhs) > tol:
            return False
        if not _same_terms(x.terms, y.terms, tol):
            return False
    return True


def _same_terms(x: Mapping[str, float], y: Mapping[str, float], tol: float) -> bool:
    return list(x) == list(y) and all(abs(x[k] - y[k]) <= tol for k in x)


def lin_sum(items: Iterable[Lin]) -> Lin:
    out = Lin()
    for item in items:
        out = out + item
    return out
