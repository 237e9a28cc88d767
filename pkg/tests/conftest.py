import numpy as np
import pytest

from pdwg.cases import builtin_case
from pdwg.mesh import build_mesh


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def square_tri():
    return build_mesh("unit_square", "triangle", 0)


@pytest.fixture
def c1():
    return builtin_case("c1_tri_sq")
