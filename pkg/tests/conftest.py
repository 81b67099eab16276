"""Pytest fixtures for arithdyn tests."""
import mpmath
import numpy as np
import pytest

from arithdyn.beta_core import Beta
from arithdyn.exactnum import golden, quadratic, tribonacci
from arithdyn.rotation import ContinuedFraction, cf_expand
from arithdyn.toral import HomoclinicPoint, ToralAutomorphism


@pytest.fixture(autouse=True)
def default_precision():
    """Run every test at the default working precision."""
    with mpmath.workdps(50):
        yield


@pytest.fixture
def golden_beta():
    """The golden ratio as an exact base."""
    return Beta.algebraic(golden())


@pytest.fixture
def tribonacci_beta():
    """The tribonacci number as an exact base."""
    return Beta.algebraic(tribonacci())


@pytest.fixture
def sqrt2_field():
    """Q(sqrt 2) with generator sqrt 2."""
    return quadratic(2)


@pytest.fixture
def silver_cf(sqrt2_field):
    """alpha = sqrt 2 - 1 = [0; 2, 2, ...]."""
    return cf_expand(sqrt2_field.generator - 1)


@pytest.fixture
def golden_cf():
    """alpha = G - 1 = [0; 1, 1, ...]."""
    return cf_expand(golden().generator - 1)


@pytest.fixture
def zeckendorf_cf():
    """alpha = 2 - G = [0; 2, 1, 1, ...], whose q_n are the Fibonacci numbers."""
    return ContinuedFraction.from_quotients((2,), (1,))


@pytest.fixture
def fibonacci_matrix():
    """The Fibonacci automorphism [[1, 1], [1, 0]]."""
    return ToralAutomorphism(((1, 1), (1, 0)))


@pytest.fixture
def golden_t(fibonacci_matrix):
    """The homoclinic point with xi = 1 for the Fibonacci automorphism."""
    return HomoclinicPoint(golden().one, fibonacci_matrix)


@pytest.fixture
def rng():
    """A seeded generator for randomized properties."""
    return np.random.default_rng(12345)
