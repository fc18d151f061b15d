import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng0():
    return np.random.default_rng(20240811)


def mc_dev(mc, exact, se):
    """|mc - exact| in units of the Monte Carlo standard error."""
    return abs(mc - exact) / se if se > 0 else float("inf")
