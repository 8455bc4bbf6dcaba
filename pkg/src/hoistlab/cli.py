"""Command-line entry point.

Exit codes: 0 success (optimal / feasible), 2 infeasible, 3 budget exhausted,
64 usage error, 66 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys
from dataclasses import dataclass, field, replace
from typing import Sequence

from .bench import (
    GeneratorParams, InstanceFormatError, InstanceUnavailable, builtin, dumps_instance, generate, load_instance,
)
from .core import Instance, LoadConfig, MultiTank, Rules
from .formulations import (
    ALL_FORMULATIONS, FormulationId, FormulationSpec, MultiDegreeOptions, MultifunctionMode, build_model,
    build_multidegree_model, multischedule_from_values, schedule_from_values,
)
from .milp import lp_relax, mip_solve, write_lp_file
from .milp.simplex import LpStatus
from .result import Budget, SolveResult, Status
from .schedule import (
    MultiSchedule, ScheduleError, build_trajectory, check_simple_cycle, load_schedule, report_lines, save_schedule,
)
from .solver import solve_multidegree, solve_simple_cycle
from .svg import SvgStyle, render_timeway_svg

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64
EXIT_INPUT = 66

_STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.FEASIBLE: EXIT_OK,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.BUDGET_EXHAUSTED: EXIT_BUDGET,
}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "infeasible" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    instance: str | None = None
    formulations: list[FormulationId] = field(default_factory=list)
    load: LoadConfig | None = None
    multifunction: MultifunctionMode = MultifunctionMode.CORRECTED
    multitank: dict[int, MultiTank] = field(default_factory=dict)
    capacity: dict[int, int] = field(default_factory=dict)
    carrier_limit: int | None = None
    degree: int = 1
    restricted: bool = False
    method: str = "native"
    liu_slack: bool = False
    integral_cycle: bool = False
    budget: Budget = field(default_factory=Budget.from_env)
    output: str | None = None
    schedule: str | None = None
    schedule_out: str | None = None

    def rules(self) -> Rules:
        return Rules(
            load_config=self.load,
            multifunction=self.multifunction is not MultifunctionMode.OFF,
            carrier_limit=self.carrier_limit,
            restricted=self.restricted,
            multitank=self.multitank or None,
        )

    def spec(self, fid: FormulationId) -> FormulationSpec:
        return FormulationSpec(
            fid, self.load, self.multifunction, self.multitank or None, self.carrier_limit,
            self.liu_slack and fid is FormulationId.LIU, integral_cycle=self.integral_cycle,
        )


def _pairs(items: Sequence[str] | None, what: str, value_optional: bool) -> dict[int, int | None]:
    out: dict[int, int | None] = {}
    for item in items or ():
        key, sep, value = item.partition(":")
        try:
            out[int(key)] = int(value) if sep else None
        except ValueError:
            raise UsageError(f"bad {what} {item!r}") from None
        if not sep and not value_optional:
            raise UsageError(f"{what} needs the form KEY:VALUE, got {item!r}")
    return out


def _source_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--builtin", metavar="NAME", help="built-in instance (ex1, ex2, philu, ...)")
    g.add_argument("--instance", metavar="PATH", help="instance file")


def _option_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--load", choices=[c.value for c in LoadConfig], help="override the load/unload configuration")
    p.add_argument("--multifunction", choices=[m.value for m in MultifunctionMode], default="corrected")
    p.add_argument("--multitank", action="append", metavar="OP[:M]",
                   help="multi-tank operation, fixed M periods or variable when M is omitted (repeatable)")
    p.add_argument("--capacity", action="append", metavar="TANK:CAP", help="tank capacity (repeatable)")
    p.add_argument("--carrier-limit", type=int, metavar="K")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hoistlab", description="Cyclic single-hoist scheduling toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="minimize the cycle time")
    _source_args(p)
    _option_args(p)
    p.add_argument("--method", choices=("native", "mip"), default="native")
    p.add_argument("--formulation", default="Imp2", help="model used by --method mip")
    p.add_argument("--degree", type=int, default=1, metavar="R")
    p.add_argument("--restricted", action="store_true", help="cycle ends when the hoist returns (native method)")
    p.add_argument("--liu-slack", action="store_true")
    p.add_argument("--integral-cycle", action="store_true", help="declare C integer in the MIP")
    p.add_argument("--budget", type=float, metavar="SECONDS")
    p.add_argument("--schedule-out", metavar="PATH", help="write the certificate schedule here")

    p = sub.add_parser("relax", help="LP relaxation value per formulation")
    _source_args(p)
    _option_args(p)
    p.add_argument("--formulation", action="append", help="repeatable; default all")
    p.add_argument("--all", action="store_true")
    p.add_argument("--liu-slack", action="store_true")

    p = sub.add_parser("check", help="check a schedule file")
    _source_args(p)
    _option_args(p)
    p.add_argument("--schedule", required=True, metavar="PATH")
    p.add_argument("--restricted", action="store_true")

    p = sub.add_parser("diagram", help="time-way diagram of a schedule as SVG")
    _source_args(p)
    p.add_argument("--schedule", required=True, metavar="PATH")
    p.add_argument("-o", "--output", metavar="PATH")
    p.add_argument("--title")

    p = sub.add_parser("export-lp", help="write a formulation as an LP file")
    _source_args(p)
    _option_args(p)
    p.add_argument("--formulation", default="Imp2")
    p.add_argument("--degree", type=int, default=1, metavar="R")
    p.add_argument("--liu-slack", action="store_true")
    p.add_argument("--integral-cycle", action="store_true")
    p.add_argument("-o", "--output", metavar="PATH")

    p = sub.add_parser("generate", help="seeded random instance")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rounding", choices=("half_up", "floor"), default="half_up")
    p.add_argument("-o", "--output", metavar="PATH")

    p = sub.add_parser("compare", help="LP and MIP value of every formulation, as CSV")
    p.add_argument("--builtin", action="append", default=[], metavar="NAME")
    p.add_argument("--instance", action="append", default=[], metavar="PATH")
    _option_args(p)
    p.add_argument("--formulation", action="append")
    p.add_argument("--no-mip", action="store_true", help="LP values only")
    p.add_argument("--budget", type=float, metavar="SECONDS", help="per MIP solve")
    p.add_argument("-o", "--output", metavar="PATH")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.command)
    cfg.builtin = args.builtin if isinstance(getattr(args, "builtin", None), str) else None
    cfg.instance = args.instance if isinstance(getattr(args, "instance", None), str) else None
    if getattr(args, "load", None):
        cfg.load = LoadConfig.parse(args.load)
    if getattr(args, "multifunction", None):
        cfg.multifunction = MultifunctionMode(args.multifunction)
    cfg.multitank = {k: MultiTank(v) for k, v in _pairs(getattr(args, "multitank", None), "multitank", True).items()}
    cfg.capacity = _pairs(getattr(args, "capacity", None), "capacity", False)
    cfg.carrier_limit = getattr(args, "carrier_limit", None)
    if cfg.carrier_limit is not None and cfg.carrier_limit < 1:
        raise UsageError("--carrier-limit must be at least 1")
    cfg.degree = getattr(args, "degree", 1)
    if cfg.degree < 1:
        raise UsageError("--degree must be at least 1")
    cfg.restricted = getattr(args, "restricted", False)
    cfg.method = getattr(args, "method", "native")
    cfg.liu_slack = getattr(args, "liu_slack", False)
    cfg.integral_cycle = getattr(args, "integral_cycle", False)
    if getattr(args, "budget", None) is not None:
        cfg.budget = Budget(seconds=args.budget)
    cfg.output = getattr(args, "output", None)
    cfg.schedule = getattr(args, "schedule", None)
    cfg.schedule_out = getattr(args, "schedule_out", None)
    raw = getattr(args, "formulation", None)
    try:
        if isinstance(raw, str):
            cfg.formulations = [FormulationId.parse(raw)]
        elif raw:
            cfg.formulations = [FormulationId.parse(x) for x in raw]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.restricted and cfg.method == "mip":
        raise UsageError("--restricted applies to the native method; pick the Phillips or Leung formulation instead")
    return cfg


def _load(cfg: RunConfig, builtin_name: str | None = None, path: str | None = None) -> Instance:
    builtin_name = builtin_name or cfg.builtin
    path = path or cfg.instance
    try:
        inst = builtin(builtin_name) if builtin_name else load_instance(path)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except (InstanceUnavailable, InstanceFormatError, OSError) as exc:
        raise InputError(str(exc)) from None
    if cfg.capacity:
        caps = dict(inst.tank_capacity)
        caps.update(cfg.capacity)
        inst = replace(inst, tank_capacity=caps)
    return inst


def _fmt(x: float | None, digits: int = 1) -> str:
    if x is None:
        return "-"
    if abs(x - round(x)) <= 1e-6:
        return str(int(round(x)))
    return f"{x:.{digits}f}"


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(str(exc)) from None


def cmd_solve(cfg: RunConfig) -> int:
    inst = _load(cfg)
    if cfg.method == "native":
        if cfg.degree == 1:
            res = solve_simple_cycle(inst, cfg.rules(), cfg.budget)
        else:
            res = solve_multidegree(inst, cfg.degree, cfg.rules(), cfg.budget)
    else:
        res = _mip(inst, cfg)
    print(f"{res.status.value} C={_fmt(res.objective, 4)}")
    print(f"bound={_fmt(res.bound, 4)} nodes={res.nodes} time={res.wall_time:.2f}s")
    if res.certificate is not None and not isinstance(res.certificate, MultiSchedule):
        print(f"carriers={check_simple_cycle(inst, res.certificate, cfg.rules()).carriers}")
    if cfg.schedule_out and res.certificate is not None:
        try:
            save_schedule(res.certificate, cfg.schedule_out)
        except OSError as exc:
            raise InputError(str(exc)) from None
    return _STATUS_EXIT[res.status]


def _mip(inst: Instance, cfg: RunConfig) -> SolveResult:
    fid = cfg.formulations[0] if cfg.formulations else FormulationId.IMP2
    if cfg.degree > 1:
        options = MultiDegreeOptions(
            cfg.load, cfg.multifunction is not MultifunctionMode.OFF, cfg.carrier_limit,
            integral_cycle=cfg.integral_cycle,
        )
        if cfg.multitank:
            raise UsageError("the r-degree model has no multi-tank rows")
        model = build_multidegree_model(inst, cfg.degree, options)
    else:
        try:
            model = build_model(inst, cfg.spec(fid))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    res = mip_solve(model, cfg.budget)
    if res.values and abs(res.values["C"] - round(res.values["C"])) <= 1e-6:
        if cfg.degree > 1:
            res.certificate = multischedule_from_values(inst, cfg.degree, res.values)
        else:
            res.certificate = schedule_from_values(inst, res.values)
    return res


def cmd_relax(cfg: RunConfig) -> int:
    inst = _load(cfg)
    for fid in cfg.formulations or ALL_FORMULATIONS:
        try:
            model = build_model(inst, cfg.spec(fid))
        except ValueError as exc:
            print(f"{fid.value} n/a ({exc})")
            continue
        sol = lp_relax(model)
        value = f"{sol.objective:.1f}" if sol.status is LpStatus.OPTIMAL else sol.status.value
        print(f"{fid.value} {value}")
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    inst = _load(cfg)
    try:
        sched = load_schedule(cfg.schedule)
    except (OSError, ScheduleError) as exc:
        raise InputError(str(exc)) from None
    if isinstance(sched, MultiSchedule):
        raise UsageError("check handles simple-cycle schedules only")
    report = check_simple_cycle(inst, sched, cfg.rules())
    for line in report_lines(report):
        print(line)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_diagram(cfg: RunConfig, title: str | None = None) -> int:
    inst = _load(cfg)
    try:
        sched = load_schedule(cfg.schedule)
    except (OSError, ScheduleError) as exc:
        raise InputError(str(exc)) from None
    if isinstance(sched, MultiSchedule):
        raise UsageError("diagram handles simple-cycle schedules only")
    try:
        trajectory = build_trajectory(inst, sched)
    except ScheduleError as exc:
        print(f"INFEASIBLE: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write(render_timeway_svg(inst, trajectory, SvgStyle(title=title)), cfg.output)
    return EXIT_OK


def cmd_export_lp(cfg: RunConfig) -> int:
    inst = _load(cfg)
    fid = cfg.formulations[0] if cfg.formulations else FormulationId.IMP2
    try:
        if cfg.degree > 1:
            options = MultiDegreeOptions(
                cfg.load, cfg.multifunction is not MultifunctionMode.OFF, cfg.carrier_limit,
                integral_cycle=cfg.integral_cycle,
            )
            model = build_multidegree_model(inst, cfg.degree, options)
        else:
            model = build_model(inst, cfg.spec(fid))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(write_lp_file(model) + "\n", cfg.output)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        params = GeneratorParams(args.n, args.mu, args.seed, args.rounding)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(dumps_instance(generate(params)), args.output)
    return EXIT_OK


def cmd_compare(cfg: RunConfig, names: list[str], paths: list[str], with_mip: bool) -> int:
    if not names and not paths:
        raise UsageError("compare needs at least one --builtin or --instance")
    sources = [(n, n, None) for n in names] + [(p, None, p) for p in paths]
    rows = []
    for label, name, path in sources:
        inst = _load(cfg, name, path)
        for fid in cfg.formulations or ALL_FORMULATIONS:
            try:
                model = build_model(inst, cfg.spec(fid))
            except ValueError:
                rows.append([label, fid.value, "", "", "UNSUPPORTED"])
                continue
            lp = lp_relax(model)
            lp_text = f"{lp.objective:.6f}" if lp.status is LpStatus.OPTIMAL else ""
            if with_mip:
                res = mip_solve(model, cfg.budget)
                mip_text = "" if res.objective is None else f"{res.objective:.6f}"
                status = res.status.value
            else:
                mip_text, status = "", lp.status.value
            rows.append([label, fid.value, lp_text, mip_text, status])
    try:
        fh = open(cfg.output, "w", newline="", encoding="utf-8") if cfg.output else contextlib.nullcontext(sys.stdout)
    except OSError as exc:
        raise InputError(str(exc)) from None
    with fh as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance", "formulation", "lp", "mip", "status"])
        writer.writerows(rows)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        cfg = _config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "relax":
            if args.all and cfg.formulations:
                raise UsageError("--all and --formulation are exclusive")
            return cmd_relax(cfg)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "diagram":
            return cmd_diagram(cfg, args.title)
        if args.command == "export-lp":
            return cmd_export_lp(cfg)
        if args.command == "compare":
            return cmd_compare(cfg, args.builtin, args.instance, not args.no_mip)
    except UsageError as exc:
        print(f"hoistlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"hoistlab: {exc}", file=sys.stderr)
        return EXIT_INPUT
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
