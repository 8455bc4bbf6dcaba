"""MIP formulations of the simple-cycle problem and the r-degree model.

The eight published models differ along four axes (extended or base,
restricted cycle finish or not, original or strengthened soak rows, valid
inequalities) plus the exact set of travel rows. Each one is a ``Recipe``;
a single builder turns any recipe into a ``ModelIR``.

Conventions shared by every builder:

* ``t_0 = 0`` and ``y_{0,j} = 1`` are substituted, not declared;
* ``Y(i, j)`` reads ``y_i_j`` when declared, ``1 - y_j_i`` otherwise;
* every big-M coefficient is ``big_m(inst)`` (times ``r`` for r-degree cycles,
  and scaled by the period count inside variable multitank rows);
* rows whose upper soak limit is infinite are left out.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, replace
from typing import Mapping

from .core import INF, Instance, LoadConfig, MultiTank, big_m, dissociated, is_inf
from .milp.model import Lin, ModelIR, VarKind, lin_sum
from .schedule import MultiSchedule, Schedule


class FormulationId(enum.Enum):
    PHILLIPS = "Phillips"
    LEUNG = "Leung"
    LEUNG_PLUS = "LeungPlus"
    ZHOU = "Zhou"
    IMP1 = "Imp1"
    IMP1_PLUS = "Imp1Plus"
    LIU = "Liu"
    IMP2 = "Imp2"

    @classmethod
    def parse(cls, text: str) -> "FormulationId":
        for f in cls:
            if f.value.lower() == text.lower().replace("+", "plus"):
                return f
        raise ValueError(f"unknown formulation {text!r}; choose from {', '.join(f.value for f in cls)}")


ALL_FORMULATIONS = tuple(FormulationId)
EXTENDED = (FormulationId.PHILLIPS, FormulationId.LEUNG, FormulationId.LEUNG_PLUS, FormulationId.ZHOU,
            FormulationId.IMP1, FormulationId.IMP1_PLUS)


class MultifunctionMode(enum.Enum):
    CORRECTED = "corrected"
    FAITHFUL = "faithful"
    OFF = "off"


class Travel(enum.Enum):
    # start rows from move 0, then both directions for 1 <= i < j; the reverse
    # row of an adjacent pair is needed once operation i+1 wraps
    SPLIT = "split"
    ALL_PAIRS = "all"  # every ordered pair among 0..n, including returns to move 0
    BASE = "base"  # start rows plus every ordered pair among 1..n


@dataclass(frozen=True)
class Recipe:
    extended: bool
    restricted: bool
    strengthened: bool
    full_y: bool
    travel: Travel
    valid: str | None = None
    first_soak_plain: bool = False


RECIPES: dict[FormulationId, Recipe] = {
    FormulationId.PHILLIPS: Recipe(True, True, False, False, Travel.SPLIT),
    FormulationId.LEUNG: Recipe(True, True, True, False, Travel.SPLIT, first_soak_plain=True),
    FormulationId.LEUNG_PLUS: Recipe(True, True, True, False, Travel.SPLIT, "leung", first_soak_plain=True),
    FormulationId.ZHOU: Recipe(True, False, False, False, Travel.SPLIT),
    FormulationId.IMP1: Recipe(True, False, True, True, Travel.ALL_PAIRS),
    FormulationId.IMP1_PLUS: Recipe(True, False, True, True, Travel.ALL_PAIRS, "imp1"),
    FormulationId.LIU: Recipe(False, False, False, False, Travel.SPLIT),
    FormulationId.IMP2: Recipe(False, False, True, True, Travel.BASE),
}

DEFECT_PHILLIPS_MULTIFUNCTION = "phillips-multifunction"
DEFECT_ZHOU_BOUNDS = "zhou-multitank-bounds"
DEFECT_RESTRICTED = "restricted-cycle-finish"


@dataclass(frozen=True)
class FormulationSpec:
    id: FormulationId = FormulationId.IMP2
    load_config: LoadConfig | None = None
    multifunction: MultifunctionMode = MultifunctionMode.CORRECTED
    multitank: Mapping[int, MultiTank] | None = None
    carrier_limit: int | None = None
    liu_slack: bool = False
    zhou_bounds_faithful: bool = False
    # declare C integer; the LP optimum over a fixed order can be half-integral
    integral_cycle: bool = False


# --- shared helpers -----------------------------------------------------------------


def t(i: int) -> Lin:
    return Lin() if i == 0 else Lin.var(f"t_{i}")


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)


class _Builder:
    """Row library over one instance; ``model.metadata`` records what a later attach needs."""

    def __init__(self, model: ModelIR, inst: Instance, M: float):
        self.model = model
        self.inst = inst
        self.n = inst.num_ops
        self.M = M

    @classmethod
    def resume(cls, model: ModelIR, inst: Instance) -> "_Builder":
        return cls(model, dissociated(inst), float(model.metadata["big_m"]))

    @property
    def slack(self) -> bool:
        return self.model.metadata.get("liu_slack") == "true"

    @property
    def strengthened(self) -> bool:
        return self.model.metadata.get("soak") == "strengthened"

    def Y(self, i: int, j: int) -> Lin:
        if i == j:
            raise ValueError("Y needs two distinct moves")
        if i == 0:
            return Lin(const=1.0)
        if j == 0:
            return Lin()
        if self.model.has_var(f"y_{i}_{j}"):
            return Lin.var(f"y_{i}_{j}")
        return 1 - Lin.var(f"y_{j}_{i}")

    def done(self, i: int) -> Lin:
        """Time move i puts its carrier down: t_i + d_i (+ slack)."""
        out = t(i) + self.inst.move_duration[i]
        if self.slack:
            out = out + Lin.var(f"dp_{i}")
        return out

    def add(self, name: str, lhs: Lin, sense: str, rhs: Lin | float, family: str) -> None:
        self.model.add(name, lhs, sense, rhs, family)

    # travel
    def forward(self, i: int, j: int, family: str = "travel") -> None:
        """Y(i,j) = 1  ->  t_j >= t_i + d_i + e_{i+1,j}."""
        e = self.inst.e(i + 1, j)
        y = self.Y(i, j)
        name = f"start_{j}" if i == 0 else f"{family}_{i}_{j}"
        self.add(name, t(j), ">=", self.done(i) + e - self.M * (1 - y), "start" if i == 0 else family)

    # soak
    def soak(self, i: int, style: str, m: int = 1) -> None:
        """Soak window of operation i; ``m`` periods for a fixed multitank operation."""
        inst, M = self.inst, self.M
        L, U = inst.soak_min[i], inst.soak_max[i]
        y = self.Y(i - 1, i)
        x = t(i) - self.done(i - 1)
        C = Lin.var("C")
        nw = (m - 1) * C + x
        wr = m * C + x
        fam = "soak" if i not in inst.multitank else "multitank"
        if style == "plain":
            self.add(f"soak_lo_{i}", nw, ">=", L, fam)
            if not is_inf(U):
                self.add(f"soak_hi_{i}", nw, "<=", U, fam)
            return
        original = style == "original"
        self.add(f"soak_lo_{i}", nw, ">=", L - M * (1 - y), fam)
        if not is_inf(U):
            self.add(f"soak_hi_{i}", nw, "<=", (U + M * (1 - y)) if original else U, fam)
        self.add(f"soakw_lo_{i}", wr, ">=", (L - M * y) if original else L, fam)
        if not is_inf(U):
            self.add(f"soakw_hi_{i}", wr, "<=", U + M * y, fam)

    def soak_variable(self, i: int) -> None:
        """Operation i picks its period count m in 1..cap through binaries u_i_m."""
        inst, M = self.inst, self.M
        L, U = inst.soak_min[i], inst.soak_max[i]
        ms = list(inst.multitank_range(i))
        cap = ms[-1]
        for m in ms:
            self.model.add_var(f"u_{i}_{m}", VarKind.BINARY)
        u = {m: Lin.var(f"u_{i}_{m}") for m in ms}
        self.add(f"usum_{i}", lin_sum(u.values()), "=", 1, "multitank")
        y = self.Y(i - 1, i)
        x = t(i) - self.done(i - 1)
        C = Lin.var("C")
        for m in ms:
            # a relaxed row may be off by up to (cap - m) or (m - 1) cycles
            m_lo = max(1, cap - m) * M
            m_hi = max(1, m - 1) * M
            self.add(f"usoak_lo_{i}_{m}", (m - 1) * C + x, ">=", L - m_lo * (2 - y - u[m]), "multitank")
            if not is_inf(U):
                self.add(f"usoak_hi_{i}_{m}", (m - 1) * C + x, "<=", U + m_hi * (1 - u[m]), "multitank")
            self.add(f"usoakw_lo_{i}_{m}", m * C + x, ">=", L - m_lo * (1 - u[m]), "multitank")
            if not is_inf(U):
                self.add(f"usoakw_hi_{i}_{m}", m * C + x, "<=", U + m_hi * (y + 1 - u[m]), "multitank")

    def multitank_bounds(self, i: int, m: int, faithful_zhou: bool) -> None:
        if m < 2:
            return
        L, U = self.inst.soak_min[i], self.inst.soak_max[i]
        C = Lin.var("C")
        if faithful_zhou:
            if not is_inf(U):
                self.add(f"mtbound_lo_{i}", C, ">=", U / m, "mtbound")
            self.add(f"mtbound_hi_{i}", C, "<=", L / (m - 1), "mtbound")
            self.model.flag_defect(DEFECT_ZHOU_BOUNDS)
            return
        self.add(f"mtbound_lo_{i}", C, ">=", -(-L // m), "mtbound")
        if not is_inf(U):
            self.add(f"mtbound_hi_{i}", C, "<=", int(U) // (m - 1), "mtbound")


def _declare_core(model: ModelIR, n: int, integral_cycle: bool) -> None:
    model.add_var("C", VarKind.INTEGER if integral_cycle else VarKind.CONTINUOUS)
    for i in range(1, n + 1):
        model.add_var(f"t_{i}")


def _travel_pairs(kind: Travel, n: int) -> list[tuple[int, int]]:
    if kind is Travel.SPLIT:
        pairs = [(0, j) for j in range(1, n + 1)]
        for i, j in itertools.combinations(range(1, n + 1), 2):
            pairs += [(i, j), (j, i)]
    elif kind is Travel.ALL_PAIRS:
        pairs = [(i, j) for i in range(n + 1) for j in range(n + 1) if i != j]
    else:
        pairs = [(0, j) for j in range(1, n + 1)]
        pairs += [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    return pairs


# --- public builders ------------------------------------------------------------------


def build_model(inst: Instance, spec: FormulationSpec | None = None) -> ModelIR:
    """ModelIR of one of the eight formulations, with the requested extensions attached."""
    spec = spec or FormulationSpec()
    recipe = RECIPES[spec.id]
    inst = dissociated(inst)
    if spec.load_config is not None or spec.multitank is not None or spec.carrier_limit is not None:
        changes: dict = {}
        if spec.load_config is not None:
            changes["load_config"] = spec.load_config
        if spec.multitank is not None:
            changes["multitank"] = dict(spec.multitank)
        if spec.carrier_limit is not None:
            changes["carrier_limit"] = spec.carrier_limit
        inst = replace(inst, **changes)
    if inst.multitank and spec.id in (FormulationId.PHILLIPS, FormulationId.LEUNG, FormulationId.LEUNG_PLUS):
        raise ValueError(f"{spec.id.value} has no multitank extension")
    if spec.liu_slack and spec.id is not FormulationId.LIU:
        raise ValueError("move-time slack exists only in the Liu formulation")

    n = inst.num_ops
    M = big_m(inst)
    model = ModelIR()
    model.metadata.update(
        formulation=spec.id.value,
        big_m=_fmt(M),
        soak="strengthened" if recipe.strengthened else "original",
        liu_slack="true" if spec.liu_slack else "false",
    )
    if recipe.restricted:
        model.flag_defect(DEFECT_RESTRICTED)
    b = _Builder(model, inst, M)

    _declare_core(model, n, spec.integral_cycle)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < j or (recipe.full_y and i != j):
                model.add_var(f"y_{i}_{j}", VarKind.BINARY)
    if recipe.extended:
        for i in range(1, n + 1):
            model.add_var(f"z_{i}", VarKind.BINARY)
        model.add_var("tmax")
    if spec.liu_slack:
        for i in range(n + 1):
            model.add_var(f"dp_{i}")

    C = Lin.var("C")
    if recipe.extended:
        z = [None] + [Lin.var(f"z_{i}") for i in range(1, n + 1)]
        tmax = Lin.var("tmax")
        ret = lin_sum((inst.move_duration[i] + inst.e(i + 1, 0)) * z[i] for i in range(1, n + 1))
        b.add("cvar", C, "=" if recipe.restricted else ">=", tmax + ret, "cvar")
        b.add("latest", lin_sum(z[1:]), "=", 1, "latest")
        for i in range(1, n + 1):
            b.add(f"tmax_lo_{i}", tmax, ">=", t(i), "tmax")
            b.add(f"tmax_hi_{i}", tmax, "<=", t(i) + M * (1 - z[i]), "tmax")
    else:
        for i in range(1, n + 1):
            b.add(f"cycle_{i}", C, ">=", b.done(i) + inst.e(i + 1, 0), "cycle")

    if recipe.full_y:
        for i, j in itertools.combinations(range(1, n + 1), 2):
            b.add(f"pair_{i}_{j}", Lin.var(f"y_{i}_{j}") + Lin.var(f"y_{j}_{i}"), "=", 1, "pair")
    for i, j in _travel_pairs(recipe.travel, n):
        if j == 0:
            # returning before move 0 is impossible, so the row reads t_i + d_i + e_{i+1,0} <= M
            b.add(f"travel_{i}_0", b.done(i) + inst.e(i + 1, 0), "<=", M, "travel")
        else:
            b.forward(i, j)

    style = "strengthened" if recipe.strengthened else "original"
    for i in range(1, n + 1):
        mt = inst.multitank.get(i)
        if mt is not None and mt.m is None:
            b.soak_variable(i)
        elif mt is not None:
            b.soak(i, style, mt.m)
            b.multitank_bounds(i, mt.m, spec.zhou_bounds_faithful and spec.id is FormulationId.ZHOU)
        elif i == 1 and recipe.first_soak_plain:
            b.soak(i, "plain")
        else:
            b.soak(i, style)

    if recipe.valid == "leung":
        for i, j in itertools.combinations(range(1, n + 1), 2):
            b.add(f"valid_succ_{i}_{j}", Lin.var(f"y_{i}_{j}"), "<=", 1 - Lin.var(f"z_{i}"), "valid")
            b.add(f"valid_pred_{i}_{j}", Lin.var(f"z_{j}"), "<=", Lin.var(f"y_{i}_{j}"), "valid")
    elif recipe.valid == "imp1":
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    b.add(f"valid_succ_{i}_{j}", Lin.var(f"y_{i}_{j}"), "<=", 1 - Lin.var(f"z_{i}"), "valid")
    if recipe.valid:
        for i in range(1, n + 1):
            others = lin_sum(b.Y(i, j) for j in range(1, n + 1) if j != i)
            b.add(f"valid_count_{i}", 1 - Lin.var(f"z_{i}"), "<=", others, "valid")

    attach_load_constraints(model, inst)
    if inst.same_tank_pairs() and spec.multifunction is not MultifunctionMode.OFF:
        attach_multifunction_constraints(model, inst, spec.multifunction)
    if inst.carrier_limit is not None:
        attach_carrier_limit(model, inst, inst.carrier_limit)
    model.minimize(C)
    return model


def attach_load_constraints(model: ModelIR, inst: Instance) -> ModelIR:
    """Load/unload station rows for the instance's configuration (none for ``NONE``)."""
    b = _Builder.resume(model, inst)
    inst = b.inst
    n = inst.num_ops
    L, U = inst.soak_min, inst.soak_max
    C = Lin.var("C")
    if inst.load_config is LoadConfig.DISSOCIATED:
        need = max(L[0], L[n + 1])
        if need > 0:
            b.add("load_min", C, ">=", need, "load")
        cap = min(U[0], U[n + 1])
        if not is_inf(cap):
            b.add("load_max", C, "<=", cap, "load")
    elif inst.load_config is LoadConfig.ASSOCIATED:
        if L[0] + L[n + 1] > 0:
            b.add("load_gap", b.done(n) + L[n + 1] + L[0], "<=", C, "load")
        if not is_inf(U[0]):
            b.add("load_max", C, "<=", b.done(n) + U[0], "load")
    return model


def attach_multifunction_constraints(model: ModelIR, inst: Instance, mode: MultifunctionMode) -> ModelIR:
    """No-overlap rows for every pair of operations sharing a single-capacity tank.

    ``CORRECTED`` adds one equality per pair: exactly one of the four boundary
    orderings is reversed. ``FAITHFUL`` reproduces the historical rows of the
    Phillips model (flagged defective: it only separates the moves by the
    minimum soak) or of the Liu model (valid).
    """
    b = _Builder.resume(model, inst)
    inst = b.inst
    formulation = model.metadata.get("formulation")
    Y = b.Y
    for i, j in inst.same_tank_pairs():
        if mode is MultifunctionMode.CORRECTED:
            lhs = Y(i - 1, i) + Y(i, j - 1) + Y(j - 1, j) + (1 - Y(i - 1, j))
            b.add(f"multi_{i}_{j}", lhs, "=", 3, "multifunction")
        elif mode is MultifunctionMode.FAITHFUL and formulation == FormulationId.PHILLIPS.value:
            d, L, M = inst.move_duration, inst.soak_min, b.M
            b.add(f"overc_{i}_{j}", Y(i - 1, i) + Y(j - 1, j), ">=", 1, "multifunction")
            gap_ij = d[i - 1] + L[i] + d[i] + inst.e(i + 1, j)
            gap_ji = d[j - 1] + L[j] + d[j] + inst.e(j + 1, i)
            y = Y(i - 1, j - 1)
            b.add(f"overij_{i}_{j}", t(j - 1), ">=", t(i - 1) + gap_ij - M * (1 - y), "multifunction")
            b.add(f"overji_{i}_{j}", t(i - 1), ">=", t(j - 1) + gap_ji - M * y, "multifunction")
            model.flag_defect(DEFECT_PHILLIPS_MULTIFUNCTION)
        elif mode is MultifunctionMode.FAITHFUL and formulation == FormulationId.LIU.value:
            b.add(f"liu12_{i}_{j}", Y(i - 1, i) + Y(j - 1, j), ">=", 1, "multifunction")
            lhs = Y(i, j - 1) + (1 - Y(i - 1, j))
            b.add(f"liu13_{i}_{j}", lhs, ">=", 3 - (Y(i - 1, i) + Y(j - 1, j)), "multifunction")
        elif mode is MultifunctionMode.FAITHFUL:
            raise ValueError(f"no historical multifunction rows for {formulation}; use the corrected mode")
    return model


def attach_multitank_constraints(
    model: ModelIR, inst: Instance, op: int, m: int | None, zhou_bounds_faithful: bool = False
) -> ModelIR:
    """Replace the soak rows of operation ``op`` by the m-period rows (``m=None``: variable)."""
    b = _Builder.resume(model, inst)
    cap = b.inst.capacity(b.inst.tank_of[op])
    if m is not None and not 1 <= m <= cap:
        raise ValueError(f"operation {op}: m = {m} exceeds the tank capacity {cap}")
    if model.metadata.get("formulation") in ("Phillips", "Leung", "LeungPlus"):
        raise ValueError(f"{model.metadata['formulation']} has no multitank extension")
    spec = dict(b.inst.multitank)
    spec[op] = MultiTank(m)
    b.inst = replace(b.inst, multitank=spec)
    model.constraints = [c for c in model.constraints if _soak_row_of(c.name) != op]
    style = model.metadata.get("soak", "strengthened")
    if m is None:
        b.soak_variable(op)
    else:
        b.soak(op, style, m)
        b.multitank_bounds(op, m, zhou_bounds_faithful and model.metadata.get("formulation") == "Zhou")
    return model


def _soak_row_of(name: str) -> int | None:
    head, _, rest = name.partition("_")
    if head not in ("soak", "soakw", "usoak", "usoakw", "usum", "mtbound"):
        return None
    parts = rest.split("_")
    return int(parts[1]) if head in ("soak", "soakw", "usoak", "usoakw", "mtbound") else int(parts[0])


def attach_carrier_limit(model: ModelIR, inst: Instance, k: int) -> ModelIR:
    """At most k carriers: one entering plus every operation in process at time 0."""
    if k < 1:
        raise ValueError("carrier limit must be at least 1")
    b = _Builder.resume(model, inst)
    inst = b.inst
    n = inst.num_ops
    total = Lin(const=1.0)
    for i in range(1, n + 1):
        total = total + (1 - b.Y(i - 1, i))
        mt = inst.multitank.get(i)
        if mt is not None and mt.m is not None:
            total = total + (mt.m - 1)
        elif mt is not None:
            total = total + lin_sum((m - 1) * Lin.var(f"u_{i}_{m}") for m in inst.multitank_range(i))
    b.add("carriers", total, "<=", k, "carrier")
    return model


# --- r-degree cycles ------------------------------------------------------------------


@dataclass(frozen=True)
class MultiDegreeOptions:
    load_config: LoadConfig | None = None
    multifunction: bool = True
    carrier_limit: int | None = None
    symmetry: bool = True
    integral_cycle: bool = False


def build_multidegree_model(inst: Instance, r: int, options: MultiDegreeOptions | None = None) -> ModelIR:
    """Base-style model of an r-degree cycle over moves (p, i), p = 0..r-1.

    Move (0, 0) starts at time 0. Load and unload stations hold one carrier at
    a time, so every pair of load intervals, every pair of unload intervals
    and (associated stations) every unload/load pair must be disjoint on the
    cyclic timeline.
    """
    if r < 1:
        raise ValueError("degree must be at least 1")
    options = options or MultiDegreeOptions()
    inst = dissociated(inst)
    if options.load_config is not None:
        inst = replace(inst, load_config=options.load_config)
    if inst.multitank:
        raise ValueError("multitank operations are only modelled for simple cycles")
    n = inst.num_ops
    d, L, U = inst.move_duration, inst.soak_min, inst.soak_max
    M = r * big_m(inst)
    moves = [(p, i) for p in range(r) for i in range(n + 1)]
    first = (0, 0)

    model = ModelIR()
    model.metadata.update(formulation=f"MultiDegree{r}", big_m=_fmt(M), soak="strengthened", liu_slack="false")
    model.add_var("C", VarKind.INTEGER if options.integral_cycle else VarKind.CONTINUOUS)

    def tv(a: tuple[int, int]) -> Lin:
        return Lin() if a == first else Lin.var(f"t_{a[0]}_{a[1]}")

    for a in moves:
        if a != first:
            model.add_var(f"t_{a[0]}_{a[1]}")
    for a, b in itertools.permutations(moves, 2):
        if first not in (a, b):
            model.add_var(f"y_{a[0]}_{a[1]}_{b[0]}_{b[1]}", VarKind.BINARY)

    def Y(a: tuple[int, int], b: tuple[int, int]) -> Lin:
        if a == first:
            return Lin(const=1.0)
        if b == first:
            return Lin()
        return Lin.var(f"y_{a[0]}_{a[1]}_{b[0]}_{b[1]}")

    def add(name: str, lhs: Lin, sense: str, rhs: Lin | float, family: str) -> None:
        model.add(name, lhs, sense, rhs, family)

    def tag(*ms: tuple[int, int]) -> str:
        return "_".join(f"{p}_{i}" for p, i in ms)

    C = Lin.var("C")
    if options.symmetry:
        for p in range(r - 1):
            add(f"symmetry_{p}", Y((p, 0), (p + 1, 0)), "=", 1, "symmetry")
    for a in moves:
        if a != first:
            add(f"cycle_{tag(a)}", C, ">=", tv(a) + d[a[1]] + inst.e(a[1] + 1, 0), "cycle")
    for a, b in itertools.combinations(moves, 2):
        if first not in (a, b):
            add(f"pair_{tag(a, b)}", Y(a, b) + Y(b, a), "=", 1, "pair")
    for a, b in itertools.permutations(moves, 2):
        if b == first:
            continue
        gap = d[a[1]] + inst.e(a[1] + 1, b[1])
        fam = "start" if a == first else "travel"
        add(f"{fam}_{tag(a, b)}", tv(b), ">=", tv(a) + gap - M * (1 - Y(a, b)), fam)

    for p in range(r):
        for i in range(1, n + 1):
            a, b = (p, i - 1), (p, i)
            y = Y(a, b)
            x = tv(b) - tv(a) - d[i - 1]
            add(f"soak_lo_{tag(b)}", x, ">=", L[i] - M * (1 - y), "soak")
            if not is_inf(U[i]):
                add(f"soak_hi_{tag(b)}", x, "<=", U[i], "soak")
            add(f"soakw_lo_{tag(b)}", C + x, ">=", L[i], "soak")
            if not is_inf(U[i]):
                add(f"soakw_hi_{tag(b)}", C + x, "<=", U[i] + M * y, "soak")

    def cyclic_order(a, b, c, e, name, family):
        add(name, Y(a, b) + Y(b, c) + Y(c, e) + (1 - Y(a, e)), "=", 3, family)

    for i in range(1, n + 1):
        for p, q in itertools.combinations(range(r), 2):
            cyclic_order((p, i - 1), (p, i), (q, i - 1), (q, i), f"overlap_{tag((p, i), (q, i))}", "overlap")
    if options.multifunction:
        for i, j in inst.same_tank_pairs():
            for p in range(r):
                cyclic_order((p, i - 1), (p, i), (p, j - 1), (p, j), f"multi_{tag((p, i), (p, j))}", "multifunction")
            for p, q in itertools.combinations(range(r), 2):
                cyclic_order((p, i - 1), (p, i), (q, j - 1), (q, j), f"multi_{tag((p, i), (q, j))}", "multifunction")
                cyclic_order((p, j - 1), (p, j), (q, i - 1), (q, i), f"multi_{tag((p, j), (q, i))}", "multifunction")

    cfg = inst.load_config
    if cfg is not LoadConfig.NONE:
        # (anchor move, start offset, end offset) of each station occupancy
        loads = [((p, 0), -L[0], 0) for p in range(r)]
        unloads = [((p, n), d[n], d[n] + L[n + 1]) for p in range(r)]
        pairs = list(itertools.combinations(loads, 2)) + list(itertools.combinations(unloads, 2))
        need = max(L[0], L[n + 1])
        if need > 0:
            add("load_min", C, ">=", need, "load")
        if cfg is LoadConfig.DISSOCIATED:
            cap = min(U[0], U[n + 1])
            if not is_inf(cap):
                add("load_max", C, "<=", cap, "load")
        else:
            pairs += [(u, l) for u in unloads for l in loads]
            if r == 1 and not is_inf(U[0]):
                add("load_max", C, "<=", tv((0, n)) + d[n] + U[0], "load")
        for (a, sa, ea), (b, sb, eb) in pairs:
            y = Y(a, b)
            name = tag(a, b)
            # a's interval first, then b's; or b's first and a's after it
            add(f"station_ab_{name}", tv(b) + sb, ">=", tv(a) + ea - M * (1 - y), "load")
            add(f"station_abw_{name}", tv(a) + sa + C, ">=", tv(b) + eb - M * (1 - y), "load")
            add(f"station_ba_{name}", tv(a) + sa, ">=", tv(b) + eb - M * y, "load")
            add(f"station_baw_{name}", tv(b) + sb + C, ">=", tv(a) + ea - M * y, "load")

    if options.carrier_limit is not None:
        total = Lin(const=float(r))
        for p in range(r):
            for i in range(1, n + 1):
                total = total + (1 - Y((p, i - 1), (p, i)))
        add("carriers", total, "<=", options.carrier_limit, "carrier")
    model.minimize(C)
    return model


# --- reading solutions back ---------------------------------------------------------------


def schedule_from_values(inst: Instance, values: Mapping[str, float]) -> Schedule:
    """Simple-cycle schedule from a MIP solution (times rounded to integers)."""
    n = inst.num_ops
    start = tuple([0] + [int(round(values[f"t_{i}"])) for i in range(1, n + 1)])
    periods = {}
    for i, spec in inst.multitank.items():
        if spec.m is not None:
            periods[i] = spec.m
        else:
            periods[i] = next(m for m in inst.multitank_range(i) if values.get(f"u_{i}_{m}", 0) > 0.5)
    return Schedule(int(round(values["C"])), start, periods)


def multischedule_from_values(inst: Instance, r: int, values: Mapping[str, float]) -> MultiSchedule:
    n = inst.num_ops
    start = tuple(
        tuple(0 if (p, i) == (0, 0) else int(round(values[f"t_{p}_{i}"])) for i in range(n + 1)) for p in range(r)
    )
    return MultiSchedule(int(round(values["C"])), start)


__all__ = [
    "ALL_FORMULATIONS",
    "DEFECT_PHILLIPS_MULTIFUNCTION",
    "DEFECT_RESTRICTED",
    "DEFECT_ZHOU_BOUNDS",
    "EXTENDED",
    "FormulationId",
    "FormulationSpec",
    "INF",
    "MultiDegreeOptions",
    "MultifunctionMode",
    "RECIPES",
    "Recipe",
    "attach_carrier_limit",
    "attach_load_constraints",
    "attach_multifunction_constraints",
    "attach_multitank_constraints",
    "build_model",
    "build_multidegree_model",
    "multischedule_from_values",
    "schedule_from_values",
]
