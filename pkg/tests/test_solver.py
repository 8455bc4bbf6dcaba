import itertools
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoistlab.bench import GeneratorParams, generate, random_variant
from hoistlab.core import LoadConfig, MultiTank, Rules, lower_bound, upper_bound
from hoistlab.formulations import MultiDegreeOptions, build_multidegree_model
from hoistlab.milp import mip_solve
from hoistlab.result import Budget, Status
from hoistlab.schedule import MultiSchedule, check_simple_cycle, count_carriers
from hoistlab.solver import (
    brute_force, feasible_at_C, min_cycle_for_order, min_cycle_schedule, solve_multidegree, solve_simple_cycle,
)


def test_feasible_at_C_ex1(ex1):
    ok, times = feasible_at_C(ex1, (0, 2, 1), 160)
    assert ok and times == (0, 50, 20)
    assert feasible_at_C(ex1, (0, 2, 1), 159) == (False, None)
    assert feasible_at_C(ex1, (0, 1, 2), 200)[0]


def test_feasible_at_C_rejects_bad_order(ex1):
    with pytest.raises(ValueError):
        feasible_at_C(ex1, (1, 0, 2), 200)
    with pytest.raises(ValueError):
        feasible_at_C(ex1, (0, 1), 200)


@pytest.mark.parametrize("method", ["jump", "bisect"])
def test_min_cycle_for_order(ex1, ex2, method):
    assert min_cycle_for_order(ex1, (0, 1, 2), method=method) == 200
    assert min_cycle_for_order(ex1, (0, 2, 1), method=method) == 160
    assert min_cycle_for_order(ex2, (0, 1, 4, 5, 2, 3), method=method) == 290


def test_min_cycle_certifies_neighbor(ex2):
    sched = min_cycle_schedule(ex2, (0, 1, 4, 5, 2, 3))
    assert check_simple_cycle(ex2, sched).feasible
    assert not feasible_at_C(ex2, (0, 1, 4, 5, 2, 3), sched.cycle_time - 1)[0]


def test_infeasible_order(ex1):
    # under (0, 2, 1) move 2 fits inside operation 1, which then soaks at least 10 + 20 + 10
    tight = replace(ex1, soak_min=(0, 20, 120, 0), soak_max=(float("inf"), 35, float("inf"), float("inf")))
    assert min_cycle_for_order(tight, (0, 2, 1)) is None
    assert min_cycle_for_order(tight, (0, 1, 2)) == 10 + 20 + 10 + 120 + 20


def test_solve_ex1(ex1):
    res = solve_simple_cycle(ex1)
    assert res.status is Status.OPTIMAL
    assert res.objective == res.bound == 160
    assert res.certificate.start == (0, 50, 20)
    assert check_simple_cycle(ex1, res.certificate).feasible


def test_solve_ex1_restricted(ex1):
    res = solve_simple_cycle(ex1, Rules(restricted=True))
    assert res.objective == 200
    assert check_simple_cycle(ex1, res.certificate, Rules(restricted=True)).feasible


def test_solve_ex2(ex2):
    res = solve_simple_cycle(ex2)
    assert res.objective == 290
    assert check_simple_cycle(ex2, res.certificate).feasible
    # without the shared-tank rule the hoist could overlap carriers in tank 1
    assert solve_simple_cycle(ex2, Rules(multifunction=False)).objective < 290


def test_carrier_limit_one_forces_primitive(ex1):
    res = solve_simple_cycle(ex1, Rules(carrier_limit=1))
    assert res.objective == 200 == upper_bound(ex1)
    assert count_carriers(ex1, res.certificate) == 1


def test_pu_fixture_optimum(pu):
    # cross-checked against the Imp2 MIP with integer C
    res = solve_simple_cycle(pu)
    assert res.objective == 488
    assert check_simple_cycle(pu, res.certificate).feasible
    limited = solve_simple_cycle(pu, Rules(carrier_limit=3))
    assert limited.objective == 647 > res.objective
    assert check_simple_cycle(pu, limited.certificate, Rules(carrier_limit=3)).feasible


def test_budget_exhaustion_keeps_incumbent(pu):
    res = solve_simple_cycle(pu, budget=Budget(nodes=5))
    assert res.status is Status.BUDGET_EXHAUSTED
    assert res.objective == upper_bound(pu)
    assert res.bound <= 488


def test_brute_force_counts(ex1, ex2):
    assert brute_force(ex1).orders_examined == 2
    assert brute_force(ex1).objective == 160
    res = brute_force(ex2)
    assert res.orders_examined == 120
    assert res.objective == 290


def test_brute_force_size_guard():
    with pytest.raises(ValueError):
        brute_force(generate(GeneratorParams(10, 2.0, 1)))


def test_single_operation():
    inst = generate(GeneratorParams(1, 2.0, 3))
    res = brute_force(inst)
    assert res.objective == upper_bound(inst) == lower_bound(inst)


def test_multitank_fixed_and_variable(ex1):
    base = replace(ex1, tank_capacity={2: 2})
    single = solve_simple_cycle(base).objective
    fixed = solve_simple_cycle(base, Rules(multitank={2: MultiTank(2)}))
    free = solve_simple_cycle(base, Rules(multitank={2: MultiTank(None)}))
    assert free.objective <= min(single, fixed.objective)
    for res, rules in ((fixed, Rules(multitank={2: MultiTank(2)})), (free, Rules(multitank={2: MultiTank(None)}))):
        assert check_simple_cycle(base, res.certificate, rules).feasible
    assert brute_force(base, Rules(multitank={2: MultiTank(None)})).objective == free.objective


# --- multi-degree -----------------------------------------------------------------------


def _multidegree_values(sched: MultiSchedule) -> dict[str, float]:
    values = {"C": float(sched.cycle_time)}
    moves = [(p, i) for p in range(sched.degree) for i in range(len(sched.start[0]))]
    t = {m: sched.start[m[0]][m[1]] for m in moves}
    for m in moves:
        if m != (0, 0):
            values[f"t_{m[0]}_{m[1]}"] = float(t[m])
    for a, b in itertools.permutations(moves, 2):
        if (0, 0) not in (a, b):
            values[f"y_{a[0]}_{a[1]}_{b[0]}_{b[1]}"] = 1.0 if t[a] < t[b] else 0.0
    return values


def _certificate_ok(inst, r, res) -> bool:
    model = build_multidegree_model(inst, r)
    return model.max_violation(_multidegree_values(res.certificate)) <= 1e-6


def test_multidegree_ex1(ex1):
    res = solve_multidegree(ex1, 2)
    assert res.objective <= 320
    assert res.objective / 2 <= 160
    assert _certificate_ok(ex1, 2, res)


def test_degree_one_equals_simple_cycle(ex1, ex2, pu):
    for inst in (ex1, ex2, pu):
        assert solve_multidegree(inst, 1).objective == solve_simple_cycle(inst).objective


@pytest.mark.parametrize("r", [2, 3])
def test_multidegree_throughput(ex1, ex2, r):
    for inst in (ex1, ex2):
        res = solve_multidegree(inst, r)
        assert res.optimal
        assert res.objective / r <= solve_simple_cycle(inst).objective
        assert _certificate_ok(inst, r, res)


@pytest.mark.parametrize("seed", range(4))
def test_multidegree_matches_mip(seed):
    inst = generate(GeneratorParams(4, 2.0, 100 + seed))
    native = solve_multidegree(inst, 2)
    mip = mip_solve(build_multidegree_model(inst, 2, MultiDegreeOptions(integral_cycle=True)))
    assert mip.optimal
    assert native.objective == round(mip.objective)
    assert _certificate_ok(inst, 2, native)


def test_multidegree_rejects_bad_degree(ex1):
    with pytest.raises(ValueError):
        solve_multidegree(ex1, 0)


# --- oracle properties --------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_search_matches_brute_force(seed, n):
    rng = np.random.default_rng(seed)
    inst = random_variant(generate(GeneratorParams(n, 2.0, seed)), rng)
    restricted = bool(rng.random() < 0.2)
    rules = Rules(restricted=restricted)
    res = solve_simple_cycle(inst, rules)
    ref = brute_force(inst, rules)
    assert res.objective == ref.objective
    if res.optimal:
        assert check_simple_cycle(inst, res.certificate, rules).feasible
        assert res.objective == res.certificate.cycle_time
        if not restricted and not inst.multitank and inst.carrier_limit is None:
            assert lower_bound(inst) <= res.objective <= upper_bound(inst)
        unrestricted = solve_simple_cycle(inst)
        assert unrestricted.objective <= res.objective


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 7))
def test_jump_and_bisect_agree(seed, n):
    rng = np.random.default_rng(seed)
    inst = random_variant(generate(GeneratorParams(n, 1.5, seed)), rng)
    order = [0] + [int(x) + 1 for x in rng.permutation(n)]
    assert min_cycle_for_order(inst, order, method="jump") == min_cycle_for_order(inst, order, method="bisect")


@pytest.mark.parametrize("config", list(LoadConfig))
def test_load_configs_on_ex1(ex1, config):
    res = solve_simple_cycle(ex1, Rules(load_config=config))
    assert res.objective == 160
