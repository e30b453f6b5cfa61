import pytest

from loiterlane import CorridorConfig, load_scenario

# Corridors of the two bundled scenarios.
CASE1 = CorridorConfig(n_slots=8, v_min=15.0, v_max=35.0, r_loiter=200.0, r_transit=80.0,
                       d_lane=350.0, d_safe=58.5)
CASE2 = CorridorConfig(n_slots=6, v_min=15.0, v_max=35.0, r_loiter=100.0, r_transit=80.0,
                       d_lane=300.0, d_safe=50.0)


@pytest.fixture
def case1():
    return CASE1


@pytest.fixture
def case2():
    return CASE2


@pytest.fixture(scope="session")
def case1_trace():
    from loiterlane import run_scenario
    return run_scenario(load_scenario("case1"))


@pytest.fixture(scope="session")
def case2_trace():
    from loiterlane import run_scenario
    return run_scenario(load_scenario("case2"))
