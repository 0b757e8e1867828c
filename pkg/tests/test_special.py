import math

import pytest
from hypothesis import given, settings, strategies as st

from utils.errors import PoleError
from utils.special import gamma_ratio, rising


def test_integer_ratio():
    assert gamma_ratio(5, 3) == 12.0


def test_cancelled_poles():
    # Γ(−1)/Γ(−3) = (−3)(−2)
    assert gamma_ratio(-1, -3) == 6.0
    assert gamma_ratio(-3, -1) == pytest.approx(1 / 6)


def test_pole_in_the_numerator_only():
    with pytest.raises(PoleError):
        gamma_ratio(-2, 1.5)


def test_pole_in_the_denominator_only():
    assert gamma_ratio(1.5, -2) == 0.0
    assert gamma_ratio(1, 0) == 0.0


def test_non_integer_difference():
    assert gamma_ratio(2.5, 1.0) == pytest.approx(math.gamma(2.5), rel=1e-13)
    assert gamma_ratio(-0.5, 1.0) == pytest.approx(math.gamma(-0.5), rel=1e-13)


def test_rising_factorial():
    assert rising(3.0, 0) == 1.0
    assert rising(0.5, 3) == pytest.approx(0.5 * 1.5 * 2.5)


@given(st.floats(min_value=0.1, max_value=50.0))
@settings(max_examples=100, deadline=None)
def test_shift_by_one(x):
    assert gamma_ratio(x + 1, x) == pytest.approx(x, rel=1e-12)


@given(st.floats(min_value=0.1, max_value=20.0), st.floats(min_value=0.1, max_value=20.0))
@settings(max_examples=100, deadline=None)
def test_agrees_with_math_gamma(x, y):
    assert gamma_ratio(x, y) == pytest.approx(math.gamma(x) / math.gamma(y), rel=1e-9)
