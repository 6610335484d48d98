from pathlib import Path

import numpy as np
import pytest

from gyrokit import KLEIN_FOUR, FiniteGyrogroupTable, group_adapter, mobius_make, read_table

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name):
    table, meta = read_table(FIXTURES / name)
    return FiniteGyrogroupTable(table, name=meta.get("name"))


@pytest.fixture
def z4():
    return group_adapter(4)


@pytest.fixture
def klein():
    return group_adapter(KLEIN_FOUR, name="Klein four")


@pytest.fixture
def disk():
    return mobius_make()


@pytest.fixture(scope="session")
def gyro8():
    """The six non-degenerate gyrogroups of order 8."""
    return [load_fixture(f"gyro8_{k}.tbl") for k in range(6)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
