from pathlib import Path

import pytest

from hoistlab.bench import builtin, load_instance
from hoistlab.schedule import load_schedule

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def ex1():
    return builtin("ex1")


@pytest.fixture
def ex2():
    return builtin("ex2")


@pytest.fixture
def pu():
    """Synthetic instance around the published 521-cycle PU schedule.

    Move times and soak durations come from that schedule; every empty trip
    takes one time unit and each soak window is the realized soak +-10.
    """
    return load_instance(FIXTURES / "pu_synthetic.json")


@pytest.fixture
def pu_schedule():
    return load_schedule(FIXTURES / "pu_reference_schedule.json")


@pytest.fixture
def ex2_reference():
    return load_schedule(FIXTURES / "ex2_reference_schedule.json")


@pytest.fixture
def ex1_optimal():
    return load_schedule(FIXTURES / "ex1_optimal_schedule.json")
