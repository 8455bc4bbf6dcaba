"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``. Benchmark instances other
than ex1 and ex2 are read from ``$HOISTLAB_DATA``; criteria that need them
fail with an "unavailable" note when the directory is missing.
"""

import time

import numpy as np
import pytest

from hoistlab.bench import (
    BUILTIN_NAMES, GeneratorParams, InstanceUnavailable, builtin, generate, random_variant,
)
from hoistlab.core import LoadConfig, Rules
from hoistlab.formulations import (
    EXTENDED, FormulationId as F, FormulationSpec, build_model, schedule_from_values,
)
from hoistlab.milp import lp_relax, mip_solve
from hoistlab.result import Budget, Status
from hoistlab.schedule import check_simple_cycle, cyclic_shift_test
from hoistlab.solver import brute_force, solve_multidegree, solve_simple_cycle

# pinned limits and tolerances
BENCH_SECONDS = 60.0
SMALL_SECONDS = 1.0
LP_TABLE_TOL = 0.05
LP_TABLE_SECONDS = 10.0
MU_TOL = 1e-6
ORDER_TOL = 1e-6
ORACLE_COUNT = 200
ORACLE_SECONDS = 300.0
MIP_MATCH_TOL = 1e-6
MIP_CERT_MAX_OPS = 8

BENCH_OPTIMA = {
    "philu": {LoadConfig.DISSOCIATED: 521},
    "philu_mini": {LoadConfig.DISSOCIATED: 284, LoadConfig.ASSOCIATED: 340},
    "bo1": {LoadConfig.DISSOCIATED: 2819, LoadConfig.ASSOCIATED: 3332},
    "bo2": {LoadConfig.DISSOCIATED: 2793, LoadConfig.ASSOCIATED: 2793},
    "cu": {LoadConfig.DISSOCIATED: 18472},
    "zn": {LoadConfig.DISSOCIATED: 17434},
    "ligne1": {LoadConfig.DISSOCIATED: 392, LoadConfig.ASSOCIATED: 425},
    "ligne2": {LoadConfig.DISSOCIATED: 712, LoadConfig.ASSOCIATED: 712},
}

_ORDER = (F.PHILLIPS, F.LEUNG, F.LEUNG_PLUS, F.ZHOU, F.IMP1, F.IMP1_PLUS, F.LIU, F.IMP2)
LP_TABLE = {
    name: dict(zip(_ORDER, row)) for name, row in {
        "philu": (211.0, 211.0, 211.0, 211.0, 211.0, 211.0, 217.0, 217.0),
        "philu_mini": (203.0, 203.0, 203.0, 203.0, 203.0, 203.0, 217.0, 217.0),
        "cu": (2756.4, 9316.5, 9316.6, 2756.0, 9316.6, 9316.6, 2834.0, 9404.5),
        "zn": (2709.0, 8725.5, 8725.6, 2709.0, 8725.5, 8725.5, 2875.0, 8879.0),
        "bo1": (2205.0, 2205.0, 2206.3, 2205.5, 2205.0, 2206.3, 2378.0, 2378.0),
        "bo2": (2205.0, 2205.0, 2206.5, 2205.0, 2205.0, 2206.5, 2378.0, 2378.0),
        "ligne1": (107.0, 188.0, 188.0, 107.0, 188.0, 188.0, 124.0, 191.0),
        "ligne2": (215.0, 369.0, 369.1, 215.0, 369.0, 369.1, 224.0, 380.5),
    }.items()
}


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


def _available(names):
    found, missing = {}, []
    for name in names:
        try:
            found[name] = builtin(name)
        except InstanceUnavailable:
            missing.append(name)
    return found, missing


def _missing_note(missing):
    return f"instance data unavailable for {', '.join(missing)}" if missing else ""


def test_criterion_1_benchmark_optima(report):
    found, missing = _available(BENCH_OPTIMA)
    bad = []
    for name, inst in found.items():
        for config, want in BENCH_OPTIMA[name].items():
            res = solve_simple_cycle(inst, Rules(load_config=config), Budget(seconds=BENCH_SECONDS))
            if res.status is not Status.OPTIMAL or res.objective != want or res.wall_time > BENCH_SECONDS:
                bad.append(f"{name}/{config.value}: {res.status.value} {res.objective} in {res.wall_time:.1f}s (want {want})")
    problems = bad + ([_missing_note(missing)] if missing else [])
    report(1, not problems, "; ".join(problems) or f"{sum(map(len, BENCH_OPTIMA.values()))} optima matched")


def test_criterion_2_counterexample(report, ex1):
    start = time.perf_counter()
    free = solve_simple_cycle(ex1).objective
    restricted = solve_simple_cycle(ex1, Rules(restricted=True)).objective
    mips = {f.value: mip_solve(build_model(ex1, FormulationSpec(f))).objective for f in (F.PHILLIPS, F.LEUNG)}
    elapsed = time.perf_counter() - start
    ok = free == 160 and restricted == 200 and all(abs(v - 200) < MIP_MATCH_TOL for v in mips.values())
    report(2, ok and elapsed < SMALL_SECONDS,
           f"unrestricted {free}, restricted {restricted}, MIP {mips}, {elapsed:.2f}s")


def test_criterion_3_multifunction(report, ex2, ex2_reference):
    start = time.perf_counter()
    res = solve_simple_cycle(ex2)
    ref = check_simple_cycle(ex2, ex2_reference)
    shift_rejects = not cyclic_shift_test(ex2, ex2_reference, (1, 3, 5))
    elapsed = time.perf_counter() - start
    ok = res.objective == 290 and ref.feasible and shift_rejects and elapsed < SMALL_SECONDS
    report(3, ok, f"optimum {res.objective}, reference schedule feasible={ref.feasible}, "
                  f"shift-sum test rejects it={shift_rejects}, {elapsed:.2f}s")


def test_criterion_4_lp_table(report):
    found, missing = _available(LP_TABLE)
    start = time.perf_counter()
    bad = []
    for name, inst in found.items():
        for fid, want in LP_TABLE[name].items():
            got = lp_relax(build_model(inst, FormulationSpec(fid, load_config=LoadConfig.NONE))).objective
            if got is None or abs(got - want) > LP_TABLE_TOL:
                bad.append(f"{name}/{fid.value}: {got} vs {want}")
    elapsed = time.perf_counter() - start
    if elapsed >= LP_TABLE_SECONDS:
        bad.append(f"took {elapsed:.1f}s")
    problems = bad + ([_missing_note(missing)] if missing else [])
    report(4, not problems, "; ".join(problems) or f"64 values within {LP_TABLE_TOL} in {elapsed:.1f}s")


def test_criterion_5_mu_invariance(report):
    spread = []
    for seed in range(10):
        values = [lp_relax(build_model(generate(GeneratorParams(14, mu, seed)))).objective for mu in (1.5, 2.0, 2.5)]
        spread.append(max(values) - min(values))
    report(5, max(spread) <= MU_TOL, f"largest spread over mu across 10 seeds: {max(spread):.2e}")


def test_criterion_6_relaxation_orderings(report):
    found, missing = _available(BUILTIN_NAMES)
    instances = dict(found)
    for k in range(30):
        n = (6, 8, 10, 12, 14)[k % 5]
        instances[f"gen-n{n}-s{k}"] = generate(GeneratorParams(n, 2.0, 500 + k))
    bad = []
    for label, inst in instances.items():
        lp = {f: lp_relax(build_model(inst, FormulationSpec(f, load_config=LoadConfig.NONE))).objective
              for f in _ORDER}
        if lp[F.LIU] < lp[F.PHILLIPS] - ORDER_TOL or lp[F.LIU] < lp[F.ZHOU] - ORDER_TOL:
            bad.append(f"{label}: Liu {lp[F.LIU]:.4f} below Phillips/Zhou")
        worse = [f for f in EXTENDED if lp[F.IMP2] < lp[f] - ORDER_TOL]
        if worse:
            above = ", ".join(f"{f.value} {lp[f]:.4f}" for f in worse)
            bad.append(f"{label}: Imp2 {lp[F.IMP2]:.4f} below {above}")
    problems = bad + ([_missing_note(missing)] if missing else [])
    report(6, not problems, "; ".join(problems) or f"{len(instances)} instances ordered")


def test_criterion_7_oracle_equivalence(report):
    rng = np.random.default_rng(20240607)
    start = time.perf_counter()
    mismatches = []
    for k in range(ORACLE_COUNT):
        n = int(rng.integers(4, 8))
        inst = random_variant(generate(GeneratorParams(n, float(rng.choice([1.5, 2.0, 2.5])), int(rng.integers(2**32)))), rng)
        native = solve_simple_cycle(inst)
        brute = brute_force(inst)
        mip = mip_solve(build_model(inst, FormulationSpec(F.IMP2, integral_cycle=True)))
        values = (native.objective, brute.objective, None if mip.objective is None else round(mip.objective))
        statuses = {native.status, brute.status, mip.status}
        if len(set(values)) != 1 or len(statuses) != 1:
            mismatches.append(f"#{k} {inst.name}: native {values[0]}, brute {values[1]}, MIP {values[2]}")
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < ORACLE_SECONDS
    report(7, ok, "; ".join(mismatches[:5]) or f"{ORACLE_COUNT} instances agree in {elapsed:.0f}s")


def test_criterion_8_certificates(report, ex1, ex2, pu):
    rng = np.random.default_rng(8)
    cases = [(ex1, Rules()), (ex1, Rules(restricted=True)), (ex2, Rules()), (pu, Rules()), (pu, Rules(carrier_limit=3))]
    for _ in range(60):
        inst = random_variant(generate(GeneratorParams(int(rng.integers(3, 9)), 2.0, int(rng.integers(2**32)))), rng)
        cases.append((inst, Rules(restricted=bool(rng.random() < 0.2))))
    checked, rejected = 0, []
    for inst, rules in cases:
        res = solve_simple_cycle(inst, rules)
        certs = [res.certificate] if res.optimal else []
        if not rules.restricted and inst.num_ops <= MIP_CERT_MAX_OPS:
            mip = mip_solve(build_model(inst, FormulationSpec(integral_cycle=True)))
            if mip.optimal:
                certs.append(schedule_from_values(inst, mip.values))
        for cert in certs:
            checked += 1
            if not check_simple_cycle(inst, cert, rules).feasible:
                rejected.append(f"{inst.name}: {cert}")
    found, missing = _available(["philu"])
    problems = list(rejected)
    if found:
        cert = solve_simple_cycle(found["philu"], budget=Budget(seconds=BENCH_SECONDS)).certificate
        carriers = check_simple_cycle(found["philu"], cert).carriers if cert is not None else None
        if carriers != 4:
            problems.append(f"philu certificate uses {carriers} carriers, expected 4")
    else:
        problems.append(_missing_note(missing) + " (PU carrier count not checked)")
    summary = f"{checked - len(rejected)}/{checked} certificates accepted"
    report(8, not problems, "; ".join([summary] + problems) if problems else summary + "; philu uses 4 carriers")


def test_criterion_9_multidegree(report):
    found, missing = _available(BUILTIN_NAMES)
    bad, notes = [], []
    for name, inst in found.items():
        c1 = solve_simple_cycle(inst, budget=Budget(seconds=BENCH_SECONDS))
        r1 = solve_multidegree(inst, 1, budget=Budget(seconds=BENCH_SECONDS))
        if r1.objective != c1.objective:
            bad.append(f"{name}: r=1 gives {r1.objective}, simple cycle {c1.objective}")
        r2 = solve_multidegree(inst, 2, budget=Budget(seconds=BENCH_SECONDS))
        if not r2.optimal:
            notes.append(f"{name} r=2 not solved within budget")
        elif r2.objective / 2 > c1.objective:
            bad.append(f"{name}: C2/2 = {r2.objective / 2} exceeds C1 = {c1.objective}")
        else:
            notes.append(f"{name} C1={c1.objective} C2={r2.objective}")
    problems = bad + ([_missing_note(missing)] if missing else [])
    report(9, not problems, "; ".join(problems + notes))
