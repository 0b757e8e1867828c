# tests/conftest.py
import numpy as np
import pytest

from models import HartogsParams, TypeI, TypeII, TypeIV
from utils.domains import make_domain


@pytest.fixture()
def disk():
    return make_domain(TypeI(1, 1))


@pytest.fixture()
def ball2():
    return make_domain(TypeI(1, 2))


@pytest.fixture()
def typeI22():
    return make_domain(TypeI(2, 2))


@pytest.fixture()
def typeII2():
    return make_domain(TypeII(2))


@pytest.fixture()
def typeIV3():
    return make_domain(TypeIV(3))


@pytest.fixture()
def disk_bundle(disk):
    """Disk base, μ = 1, d0 = 1: the unit ball of C²."""
    return HartogsParams(disk, 1.0, 1)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
