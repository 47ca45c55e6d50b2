import pytest

from rbwalk.clifford import build_table


@pytest.fixture(scope="session")
def table():
    return build_table()
