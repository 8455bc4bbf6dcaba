"""Instance files, the built-in corpus and the seeded random generator.

Instance file format (JSON, one object per file)::

    {
      "name": "ex1",
      "scale": 1,                      # times were multiplied by this factor
      "num_tanks": 2,
      "load_config": "associated",     # dissociated | associated | none
      "tank_of": [0, 1, 2, 0],         # s_0 .. s_{n+1}
      "move_duration": [10, 10, 20],   # d_0 .. d_n
      "soak_min": [0, 40, 120, 0],     # L_0 .. L_{n+1}
      "soak_max": ["inf", 100, "inf", "inf"],
      "travel": [[0, 10, 20], [10, 0, 10], [20, 10, 0]],
      "tank_capacity": {"2": 3},       # optional, tank -> capacity
      "multitank": {"1": 2},           # optional, op -> fixed m or null
      "carrier_limit": null            # optional
    }

Times are integers; ``"inf"`` is the only non-integer value allowed and only
in ``soak_max``.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, replace
from decimal import ROUND_FLOOR, ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path

import numpy as np

from .core import INF, Instance, LoadConfig, MultiTank, is_inf, validate_instance

BUILTIN_NAMES = ("ex1", "ex2", "philu", "philu_mini", "bo1", "bo2", "cu", "zn", "ligne1", "ligne2")
MANIFEST = "MANIFEST.sha256"
DATA_ENV = "HOISTLAB_DATA"


class InstanceFormatError(ValueError):
    """Malformed or invalid instance file; ``problems`` lists every finding."""

    def __init__(self, source: str, problems: list[str]):
        self.source = source
        self.problems = problems
        super().__init__(f"{source}: " + "; ".join(problems))


class InstanceUnavailable(LookupError):
    pass


def instance_to_dict(inst: Instance) -> dict:
    def time(v: float):
        return "inf" if is_inf(v) else int(v)

    return {
        "name": inst.name,
        "scale": inst.scale,
        "num_tanks": inst.num_tanks,
        "load_config": inst.load_config.value,
        "tank_of": list(inst.tank_of),
        "move_duration": list(inst.move_duration),
        "soak_min": list(inst.soak_min),
        "soak_max": [time(v) for v in inst.soak_max],
        "travel": [list(row) for row in inst.travel],
        "tank_capacity": {str(k): v for k, v in sorted(inst.tank_capacity.items())},
        "multitank": {str(k): v.m for k, v in sorted(inst.multitank.items())},
        "carrier_limit": inst.carrier_limit,
    }


def dumps_instance(inst: Instance) -> str:
    """One field per line, one travel row per line."""
    doc = instance_to_dict(inst)
    lines = []
    for key, value in doc.items():
        if key == "travel":
            rows = ",\n".join(f"    {json.dumps(row)}" for row in value)
            lines.append(f'  "travel": [\n{rows}\n  ]')
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def _int_list(doc: dict, key: str, problems: list[str], allow_inf: bool = False) -> list | None:
    raw = doc.get(key)
    if not isinstance(raw, list):
        problems.append(f"field {key!r} missing or not a list")
        return None
    out = []
    for k, v in enumerate(raw):
        if allow_inf and v == "inf":
            out.append(INF)
        elif isinstance(v, int) and not isinstance(v, bool):
            out.append(v)
        else:
            problems.append(f"{key}[{k}] = {v!r} is not an integer" + (" or 'inf'" if allow_inf else ""))
    return out


def instance_from_dict(doc: dict, source: str = "<instance>") -> Instance:
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise InstanceFormatError(source, ["top level must be an object"])
    tank_of = _int_list(doc, "tank_of", problems)
    d = _int_list(doc, "move_duration", problems)
    L = _int_list(doc, "soak_min", problems)
    U = _int_list(doc, "soak_max", problems, allow_inf=True)
    num_tanks = doc.get("num_tanks")
    if not isinstance(num_tanks, int):
        problems.append("field 'num_tanks' missing or not an integer")
    travel = doc.get("travel")
    if not isinstance(travel, list):
        problems.append("field 'travel' missing or not a list")
    elif isinstance(num_tanks, int) and tank_of:
        size = num_tanks + (1 if tank_of[-1] == 0 else 2)
        for a in range(size):
            if a >= len(travel):
                problems.append(f"travel row {a} missing (expected {size} rows)")
            elif not isinstance(travel[a], list) or len(travel[a]) != size:
                problems.append(f"travel row {a} must list {size} integers")
        if len(travel) > size:
            problems.append(f"travel has {len(travel)} rows, expected {size}")
    try:
        load = LoadConfig.parse(doc.get("load_config", "dissociated"))
    except ValueError as exc:
        problems.append(str(exc))
        load = LoadConfig.DISSOCIATED
    try:
        capacity = {int(k): int(v) for k, v in (doc.get("tank_capacity") or {}).items()}
        multitank = {int(k): MultiTank(None if v is None else int(v)) for k, v in (doc.get("multitank") or {}).items()}
    except (TypeError, ValueError, AttributeError):
        problems.append("tank_capacity and multitank must map integer keys to integers")
        capacity, multitank = {}, {}
    if problems:
        raise InstanceFormatError(source, problems)
    try:
        inst = Instance(
            num_tanks, tuple(tank_of), tuple(d), tuple(L), tuple(U), tuple(tuple(r) for r in travel),
            load, capacity, multitank, doc.get("carrier_limit"), doc.get("name", ""), int(doc.get("scale", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(source, [str(exc)]) from None
    problems = validate_instance(inst)
    if problems:
        raise InstanceFormatError(source, problems)
    return inst


def loads_instance(text: str, source: str = "<instance>") -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(source, [f"line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    return instance_from_dict(doc, source)


def load_instance(path: str | os.PathLike) -> Instance:
    path = Path(path)
    return loads_instance(path.read_text(encoding="utf-8"), str(path))


def save_instance(inst: Instance, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def read_manifest(text: str) -> dict[str, str]:
    """``sha256sum``-style lines: ``<hex digest>  <file name>``."""
    out = {}
    for line in text.splitlines():
        if line.strip():
            digest, name = line.split(maxsplit=1)
            out[name.strip()] = digest
    return out


def _packaged(name: str) -> tuple[bytes | None, dict[str, str]]:
    data = resources.files("hoistlab") / "data"
    manifest = read_manifest((data / MANIFEST).read_text(encoding="utf-8"))
    file = data / f"{name}.json"
    return (file.read_bytes() if file.is_file() else None), manifest


def builtin(name: str) -> Instance:
    """Built-in instance by name.

    ``ex1`` and ``ex2`` ship with the package. The benchmark instances are
    looked up in the directory named by ``HOISTLAB_DATA``; a file whose name
    is pinned in the manifest must match its digest.
    """
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown builtin instance {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    raw, manifest = _packaged(name)
    source = f"builtin:{name}"
    if raw is None:
        folder = os.environ.get(DATA_ENV)
        path = Path(folder) / f"{name}.json" if folder else None
        if path is None or not path.is_file():
            raise InstanceUnavailable(
                f"instance data for {name!r} is not bundled; place {name}.json in ${DATA_ENV}"
            )
        raw, source = path.read_bytes(), str(path)
    pinned = manifest.get(f"{name}.json")
    if pinned is not None and sha256_hex(raw) != pinned:
        raise InstanceFormatError(source, [f"checksum mismatch: expected {pinned}, got {sha256_hex(raw)}"])
    return loads_instance(raw.decode("utf-8"), source)


def available_builtins() -> list[str]:
    out = []
    for name in BUILTIN_NAMES:
        try:
            builtin(name)
        except InstanceUnavailable:
            continue
        out.append(name)
    return out


@dataclass(frozen=True)
class GeneratorParams:
    n: int
    mu: float
    seed: int
    rounding: str = "half_up"  # or "floor"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not self.mu > 1:
            raise ValueError("mu must exceed 1")
        if self.rounding not in ("half_up", "floor"):
            raise ValueError(f"unknown rounding {self.rounding!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def _uniform(rng: np.random.Generator, a: int, b: int, size: int) -> list[int]:
    return [int(x) for x in rng.integers(a, b, size=size, endpoint=True)]


def generate(params: GeneratorParams) -> Instance:
    """Random dissociated line instance.

    Tanks sit on a line in processing order; step times are 1 + U{0..4},
    moves take their step plus 12, soak minima are 40 + U{0..140} and maxima
    are mu times the minima, rounded. The load operation gets L_0 = 0 and an
    open maximum so loading never blocks. The draws do not depend on mu, so
    instances sharing (n, seed) differ only in their maxima.
    """
    n = params.n
    rng = np.random.Generator(np.random.Philox(params.seed))
    steps = _uniform(rng, 0, 4, n + 1)
    steps = [1 + s for s in steps]
    lows = [40 + x for x in _uniform(rng, 0, 140, n + 1)]
    pos = [0]
    for s in steps:
        pos.append(pos[-1] + s)
    travel = tuple(tuple(abs(a - b) for b in pos) for a in pos)
    mode = ROUND_HALF_UP if params.rounding == "half_up" else ROUND_FLOOR
    mu = Decimal(repr(params.mu))

    def cap(low: int) -> int:
        return int((mu * low).to_integral_value(rounding=mode))

    soak_min = (0,) + tuple(lows[1:]) + (0,)
    soak_max = (INF,) + tuple(cap(v) for v in lows[1:]) + (INF,)
    return Instance(
        n, tuple(range(n + 2)), tuple(s + 12 for s in steps), soak_min, soak_max, travel,
        LoadConfig.DISSOCIATED, name=f"gen-n{n}-mu{params.mu}-s{params.seed}",
    )


def random_variant(inst: Instance, rng: np.random.Generator) -> Instance:
    """Randomly switch on problem features for oracle sweeps.

    May give a later operation the tank of an earlier one (multifunction),
    make one operation multi-tank with capacity 2, change the load
    configuration and add a carrier limit. Moves are stretched where a tank
    change makes them shorter than the loaded trip.
    """
    n = inst.num_ops
    tank_of = list(inst.tank_of)
    if n >= 3 and rng.random() < 0.5:
        i = int(rng.integers(1, n - 1))
        j = int(rng.integers(i + 2, n + 1))
        tank_of[j] = tank_of[i]
    capacity: dict[int, int] = {}
    multitank: dict[int, MultiTank] = {}
    if rng.random() < 0.3:
        single = [k for k in range(1, n + 1) if tank_of.count(tank_of[k]) == 1]
        if single:
            op = single[int(rng.integers(len(single)))]
            capacity[tank_of[op]] = 2
            multitank[op] = MultiTank([None, 1, 2][int(rng.integers(3))])
    load = list(LoadConfig)[int(rng.integers(3))]
    limit = [None, None, 2, 3][int(rng.integers(4))]
    tr = inst.travel
    d = tuple(max(inst.move_duration[k], tr[tank_of[k]][tank_of[k + 1]]) for k in range(n + 1))
    return replace(
        inst, tank_of=tuple(tank_of), move_duration=d, tank_capacity=capacity, multitank=multitank,
        load_config=load, carrier_limit=limit,
    )
