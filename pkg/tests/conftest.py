import numpy as np
import pytest

import nearcurve as nc


@pytest.fixture(scope="session")
def parabola():
    return nc.parabola()


@pytest.fixture(scope="session")
def veronese3():
    return nc.veronese(3)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
