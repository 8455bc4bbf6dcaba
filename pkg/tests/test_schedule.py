from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoistlab.bench import GeneratorParams, generate, random_variant
from hoistlab.core import LoadConfig, Rules, lower_bound, upper_bound
from hoistlab.schedule import (
    EmptyTravel, Move, Schedule, ScheduleError, Wait, build_trajectory, check_simple_cycle, count_carriers,
    cyclic_shift_sum, cyclic_shift_test, execution_order, load_schedule, operation_start_times,
    primitive_schedule, report_lines, save_schedule, schedule_from_dict, schedule_to_dict,
)
from hoistlab.solver import min_cycle_schedule


def test_operation_start_times_ex1(ex1, ex1_optimal):
    # t+_1 = t_0 + d_0, t+_2 = t_1 + d_1, t+_0 = t_2 + d_2
    assert operation_start_times(ex1, ex1_optimal) == (40, 10, 60)


def test_operation_start_times_wraps_mod_cycle(ex1):
    sched = Schedule(100, (0, 50, 90))
    assert operation_start_times(ex1, sched)[0] == 10


def test_operation_start_time_on_cycle_edge(ex1):
    sched = Schedule(100, (0, 90, 20))
    assert operation_start_times(ex1, sched)[2] == 0


def test_pu_wrapping_operation(pu, pu_schedule):
    t_plus = operation_start_times(pu, pu_schedule)
    # move 3 ends at 485 + 22 = 507, after move 4 has already started at 76
    assert t_plus[4] == 507
    assert t_plus[4] > pu_schedule.start[4]


def test_execution_order(ex1_optimal):
    assert execution_order(ex1_optimal) == (0, 2, 1)
    assert execution_order(Schedule(100, (0, 10, 20, 30))) == (0, 1, 2, 3)
    with pytest.raises(ScheduleError):
        execution_order(Schedule(100, (0, 10, 10)))


def test_ex1_trajectory(ex1, ex1_optimal):
    segments = build_trajectory(ex1, ex1_optimal).segments
    assert segments == (
        Move(0, 0, 1, 0, 10),
        EmptyTravel(1, 2, 10, 20),
        Move(2, 2, 0, 20, 40),
        EmptyTravel(0, 1, 40, 50),
        Move(1, 1, 2, 50, 60),
        EmptyTravel(2, 0, 60, 80),
        Wait(0, 80, 160),
    )


def test_primitive_trajectory_waits_exactly_soak(ex1):
    sched = primitive_schedule(ex1)
    assert sched == Schedule(200, (0, 50, 180))
    waits = [s for s in build_trajectory(ex1, sched).segments if isinstance(s, Wait)]
    assert [w.end - w.start for w in waits] == [40, 120]
    assert count_carriers(ex1, sched) == 1


def test_trajectory_rejects_late_arrival(ex1):
    with pytest.raises(ScheduleError):
        build_trajectory(ex1, Schedule(160, (0, 50, 15)))


def _partition_ok(traj) -> bool:
    now = 0
    for seg in traj.segments:
        if seg.start != now or seg.end < seg.start:
            return False
        now = seg.end
    return now == traj.cycle_time


def test_trajectory_partitions_cycle(pu, pu_schedule):
    traj = build_trajectory(pu, pu_schedule)
    assert _partition_ok(traj)
    assert sorted(m.op for m in traj.moves()) == list(range(13))
    assert sum(pu.move_duration) <= pu_schedule.cycle_time


def test_pu_schedule_feasible_with_four_carriers(pu, pu_schedule):
    report = check_simple_cycle(pu, pu_schedule)
    assert report.feasible, report.to_text()
    assert report.carriers == 4
    assert count_carriers(pu, pu_schedule) == 4


def test_ex2_reference_schedule(ex2, ex2_reference):
    report = check_simple_cycle(ex2, ex2_reference)
    assert report.feasible, report.to_text()
    assert report.carriers == 2
    assert list(report_lines(report)) == ["FEASIBLE, carriers=2"]
    # visits tank 1 in the order 1, 5, 3: not a cyclic shift of (1, 3, 5)
    assert cyclic_shift_sum(ex2, ex2_reference, (1, 3, 5)) == 4
    assert not cyclic_shift_test(ex2, ex2_reference, (1, 3, 5))


def test_cyclic_shift_test_accepts_shift(ex2):
    # primitive order visits tank 1 as 1, 3, 5
    sched = primitive_schedule(ex2)
    assert check_simple_cycle(ex2, sched).feasible
    assert cyclic_shift_test(ex2, sched, (1, 3, 5))


def test_restricted_finish_rejects_waiting(ex1, ex1_optimal):
    report = check_simple_cycle(ex1, ex1_optimal, Rules(restricted=True))
    assert not report.feasible
    assert report.families() == {"cycle"}
    assert check_simple_cycle(ex1, ex1_optimal).feasible


def test_multifunction_overlap_detected(ex2):
    sched = Schedule(120, (0, 90, 80, 50, 30, 110))
    report = check_simple_cycle(ex2, sched)
    assert "multifunction" in report.families()
    assert check_simple_cycle(ex2, sched, Rules(multifunction=False)).families() <= {"soak"}


def test_soak_violation_reports_slack(ex1):
    report = check_simple_cycle(ex1, Schedule(200, (0, 30, 180)))
    soak = [v for v in report.violations if v.family == "soak"]
    assert soak and soak[0].indices == (1,)
    assert soak[0].slack == -20


def test_associated_gap(ex1):
    inst = replace(ex1, soak_min=(30, 40, 120, 30))
    report = check_simple_cycle(inst, Schedule(160, (0, 50, 20)))
    assert "load" not in report.families()
    tight = check_simple_cycle(inst, Schedule(200, (0, 50, 180)))
    assert "load" in tight.families()


def test_carrier_limit(pu, pu_schedule):
    report = check_simple_cycle(pu, pu_schedule, Rules(carrier_limit=3))
    assert report.families() == {"carrier"}


def test_schedule_round_trip(tmp_path, pu_schedule):
    path = tmp_path / "s.json"
    save_schedule(pu_schedule, path)
    assert load_schedule(path) == pu_schedule
    with_periods = Schedule(10, (0, 3), {1: 2})
    assert schedule_from_dict(schedule_to_dict(with_periods)) == with_periods


def test_schedule_file_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"cycle_time": 3')
    with pytest.raises(ScheduleError, match="line 1"):
        load_schedule(path)
    with pytest.raises(ScheduleError):
        schedule_from_dict({"start": [0]})


# --- checker against trajectory --------------------------------------------------


def _random_pair(rng: np.random.Generator):
    n = int(rng.integers(2, 9))
    inst = generate(GeneratorParams(n, float(rng.choice([1.5, 2.0, 2.5])), int(rng.integers(2**32))))
    inst = random_variant(inst, rng)
    if rng.random() < 0.5:
        order = [0] + [int(x) + 1 for x in rng.permutation(n)]
        sched = min_cycle_schedule(inst, order)
        if sched is not None:
            start = [t + int(rng.integers(-3, 4)) if k and rng.random() < 0.3 else t for k, t in enumerate(sched.start)]
            C = sched.cycle_time + int(rng.integers(-2, 6))
            if len(set(start)) == len(start) and min(start[1:]) > 0 and max(start) < C:
                return inst, Schedule(C, tuple(start))
    C = int(rng.integers(lower_bound(inst), upper_bound(inst) + 1))
    start = (0,) + tuple(int(x) for x in rng.choice(np.arange(1, C), size=n, replace=False))
    return inst, Schedule(C, start)


def _trajectory_ok(inst, sched) -> bool:
    try:
        build_trajectory(inst, sched)
    except ScheduleError:
        return False
    return True


def test_checker_agrees_with_trajectory():
    rng = np.random.default_rng(20240611)
    feasible = 0
    for _ in range(1000):
        inst, sched = _random_pair(rng)
        report = check_simple_cycle(inst, sched)
        hoist_ok = not report.families() & {"travel", "cycle"}
        assert hoist_ok == _trajectory_ok(inst, sched), (inst, sched, report.to_text())
        feasible += report.feasible
    # the sample must exercise both outcomes
    assert 50 < feasible < 950


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_checker_agrees_with_trajectory_property(seed):
    inst, sched = _random_pair(np.random.default_rng(seed))
    report = check_simple_cycle(inst, sched)
    assert (not report.families() & {"travel", "cycle"}) == _trajectory_ok(inst, sched)
    if report.feasible:
        assert report.carriers == count_carriers(inst, sched)
        assert _partition_ok(build_trajectory(inst, sched))


@pytest.mark.parametrize("config", list(LoadConfig))
def test_primitive_schedule_feasible(config):
    for seed in range(5):
        inst = replace(generate(GeneratorParams(6, 2.0, seed)), load_config=config)
        sched = primitive_schedule(inst)
        assert sched.cycle_time == upper_bound(inst)
        assert check_simple_cycle(inst, sched).feasible
