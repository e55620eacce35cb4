import numpy as np
import pytest

from compop.symbol import make_symbol
from compop.weight import make_classical_weight, parse_weight_key


@pytest.fixture(scope="session")
def hardy():
    return make_classical_weight(1.0)


@pytest.fixture(scope="session")
def bergman():
    return make_classical_weight(2.0)


@pytest.fixture(scope="session")
def dirichlet():
    return make_classical_weight(0.0)


@pytest.fixture(scope="session")
def half():
    return make_classical_weight(0.5)


@pytest.fixture(scope="session")
def flat_density_weight():
    return parse_weight_key("sigma:0")


@pytest.fixture(scope="session")
def blaschke3():
    return make_symbol("blaschke:[0,0.5,-0.3j]")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
