import cmath
import math

import numpy as np
import pytest

from qtoroidal.params import make_rng, sample_params


@pytest.fixture
def params1():
    return sample_params(11, 1)


@pytest.fixture
def params2():
    return sample_params(12, 2)


@pytest.fixture
def params3():
    return sample_params(13, 3)


@pytest.fixture
def rng():
    return make_rng(2024, "tests")


def random_u(rng: np.random.Generator, tau: complex, spread: float = 0.3) -> complex:
    return complex(rng.uniform(0, 1)) + rng.uniform(-spread, spread) * tau


def random_z(rng: np.random.Generator) -> complex:
    return cmath.rect(rng.uniform(0.3, 2.0), rng.uniform(-math.pi, math.pi))


def rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)
