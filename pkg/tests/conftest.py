import numpy as np
import pytest

from spikedwishart.painleve import solve_hastings_mcleod


@pytest.fixture(scope="session")
def hm_table():
    """Painleve table shared across the session; building it is not free."""
    return solve_hastings_mcleod()


@pytest.fixture()
def rng():
    return np.random.default_rng(987654321)
