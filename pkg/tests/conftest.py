import numpy as np
import pytest

from weakloop import (
    QuadraticCost,
    StateSpace,
    benchmark_config,
    run_case,
    zoh_discretize,
)


@pytest.fixture(scope="session")
def bench_plant() -> StateSpace:
    """Three-state diagonal benchmark plant."""
    return benchmark_config(2).plant()


@pytest.fixture(scope="session")
def bench_plant_d(bench_plant):
    return zoh_discretize(bench_plant, 1.0)


@pytest.fixture(scope="session")
def bench_gain() -> np.ndarray:
    return np.array([[2.0], [4.0], [1.0]]) / 6.0


@pytest.fixture(scope="session")
def bench_cost() -> QuadraticCost:
    return QuadraticCost(Q=2.0 * np.eye(3), c=[1.0, 0.0, 4.0])


@pytest.fixture(scope="session")
def v_steady() -> np.ndarray:
    """Nominal action the loop settles to under the unit step disturbance."""
    return -3.5 * np.array([2.0, 4.0, 1.0]) / 6.0


@pytest.fixture(scope="session")
def case2_trace():
    return run_case(benchmark_config(2))


@pytest.fixture(scope="session")
def case3_trace():
    return run_case(benchmark_config(3))


@pytest.fixture(scope="session")
def case4_run():
    """The long learning run, shared across tests (it costs a few seconds)."""
    return run_case(benchmark_config(4), return_extras=True)


def scalar_y(record) -> float:
    return float(np.asarray(record.y).reshape(()))
