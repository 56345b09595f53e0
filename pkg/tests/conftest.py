import numpy as np
import pytest

from qmultimeter.groups import q8_representation, weyl_heisenberg


@pytest.fixture(scope="session")
def q8():
    return q8_representation()


@pytest.fixture(scope="session")
def wh3():
    return weyl_heisenberg(3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
