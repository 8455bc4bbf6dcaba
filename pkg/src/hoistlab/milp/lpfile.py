"""CPLEX-LP text export and the matching parser.

File layout, in this order:

* ``\\ key: value`` comment lines carrying the model metadata (formulation id,
  defect flags),
* ``Minimize`` with a single ``obj:`` line,
* ``Subject To`` with one ``name: terms sense rhs`` line per row,
* ``Bounds`` listing every column: ``lb <= name <= ub``, ``name = v`` when
  fixed, ``+inf``/``-inf`` for infinite sides,
* ``Binaries`` and ``Generals`` (one name per line), then ``End``.

Columns and rows keep the model's insertion order, so equal models give
byte-identical files. Sections with nothing to list are left out.
"""

from __future__ import annotations

import math
import re

from .model import Constraint, ModelIR, Sense, Variable, VarKind


class LpParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _num(x: float) -> str:
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _terms(terms: dict[str, float]) -> str:
    parts = []
    for name, coef in terms.items():
        sign = "-" if coef < 0 else "+"
        parts.append(f"{sign} {_num(abs(coef))} {name}")
    return " ".join(parts)


def write_lp_file(model: ModelIR) -> str:
    lines = [f"\\ {key}: {value}" for key, value in model.metadata.items()]
    lines += ["Minimize", f" obj: {_terms(model.objective)}", "Subject To"]
    for row in model.constraints:
        lines.append(f" {row.name}: {_terms(row.terms)} {row.sense.value} {_num(row.rhs)}")
    if model.variables:
        lines.append("Bounds")
        for v in model.variables:
            if v.fixed:
                lines.append(f" {v.name} = {_num(v.lb)}")
            else:
                lines.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    for header, kind in (("Binaries", VarKind.BINARY), ("Generals", VarKind.INTEGER)):
        names = [v.name for v in model.variables if v.kind is kind]
        if names:
            lines.append(header)
            lines += [f" {name}" for name in names]
    lines.append("End")
    return "\n".join(lines)


_TERM = re.compile(r"([+-])\s*([0-9.eE+-]+|inf)\s+([A-Za-z_][\w.\[\]]*)")
_SECTIONS = {"minimize": "obj", "subject to": "rows", "bounds": "bounds", "binaries": "bin", "generals": "gen", "end": "end"}


def _parse_terms(text: str, line_no: int) -> dict[str, float]:
    text = text.strip()
    terms: dict[str, float] = {}
    pos = 0
    for match in _TERM.finditer(text):
        if text[pos:match.start()].strip():
            raise LpParseError(line_no, f"cannot read terms near {text[pos:match.start()]!r}")
        sign, coef, name = match.groups()
        value = float(coef) * (-1 if sign == "-" else 1)
        if name in terms:
            raise LpParseError(line_no, f"variable {name} repeated in one row")
        terms[name] = value
        pos = match.end()
    if text[pos:].strip():
        raise LpParseError(line_no, f"cannot read terms near {text[pos:]!r}")
    return terms


def _parse_num(text: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise LpParseError(line_no, f"bad number {text!r}") from None


def parse_lp_file(text: str) -> ModelIR:
    """Inverse of ``write_lp_file`` (it reads the subset the writer emits)."""
    model = ModelIR()
    section = None
    bounds: dict[str, tuple[float, float]] = {}
    kinds: dict[str, VarKind] = {}
    order: list[str] = []
    rows: list[tuple[str, dict[str, float], Sense, float]] = []
    objective: dict[str, float] = {}

    def note(name: str) -> None:
        if name not in bounds:
            bounds[name] = (0.0, math.inf)
            order.append(name)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            if section is None and ":" in line:
                key, value = line[1:].split(":", 1)
                model.metadata[key.strip()] = value.strip()
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            continue
        if section == "obj":
            label, _, body = line.partition(":")
            if label.strip() != "obj":
                raise LpParseError(line_no, "objective line must be labelled obj")
            objective = _parse_terms(body, line_no)
        elif section == "rows":
            match = re.fullmatch(r"([^:\s]+):\s*(.*?)\s*(<=|>=|=)\s*(\S+)", line)
            if not match:
                raise LpParseError(line_no, f"malformed row {line!r}")
            name, body, sense, rhs = match.groups()
            terms = _parse_terms(body, line_no)
            rows.append((name, terms, Sense(sense), _parse_num(rhs, line_no)))
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 3 and parts[1] == "=":
                value = _parse_num(parts[2], line_no)
                note(parts[0])
                bounds[parts[0]] = (value, value)
            elif len(parts) == 5 and parts[1] == parts[3] == "<=":
                note(parts[2])
                bounds[parts[2]] = (_parse_num(parts[0], line_no), _parse_num(parts[4], line_no))
            else:
                raise LpParseError(line_no, f"malformed bound {line!r}")
        elif section in ("bin", "gen"):
            for name in line.split():
                note(name)
                kinds[name] = VarKind.BINARY if section == "bin" else VarKind.INTEGER
        elif section == "end":
            raise LpParseError(line_no, "text after End")
        else:
            raise LpParseError(line_no, f"unexpected line {line!r}")
    if section != "end":
        raise LpParseError(len(text.splitlines()), "missing End")

    for name in order:
        lb, ub = bounds[name]
        model.variables.append(Variable(name, kinds.get(name, VarKind.CONTINUOUS), lb, ub))
        model._index[name] = len(model.variables) - 1
    for name, terms, sense, rhs in rows:
        for v in terms:
            if not model.has_var(v):
                raise LpParseError(0, f"row {name} uses {v}, which has no bound line")
        model.constraints.append(Constraint(name, terms, sense, rhs))
    model.objective = objective
    return model
