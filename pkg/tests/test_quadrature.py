import math

import numpy as np
import pytest

from models import SampleSet
from utils.domains import generic_norm, sample_interior
from utils.errors import IntegrandError, UnsupportedError
from utils.quadrature import gauss_legendre_01, integrate, radial_rule, simplex_rule


def test_gauss_legendre_on_unit_interval():
    x, w = gauss_legendre_01(4)
    assert np.sum(w * x ** 5) == pytest.approx(1 / 6, rel=1e-14)


def test_simplex_rule_moments():
    # ∫ t1² t2³ over the 2-simplex = 2!·3!/7!
    t, w = simplex_rule(2, 5)
    assert np.sum(w * t[:, 0] ** 2 * t[:, 1] ** 3) == pytest.approx(1 / 420, rel=1e-12)
    assert np.sum(w) == pytest.approx(0.5, rel=1e-14)


def test_disk_radial_rule(disk):
    rule = radial_rule(disk, 4)
    assert rule.kind == "radial"
    value, stderr = integrate(lambda p: np.abs(p[:, 0]) ** 4, rule)
    assert value == pytest.approx(math.pi / 3, rel=1e-13)
    assert stderr == 0.0


def test_ball_volume(ball2):
    assert radial_rule(ball2, 0).total_weight == pytest.approx(math.pi ** 2 / 2, rel=1e-13)


@pytest.mark.parametrize("mu,volume", [(1.0, math.pi ** 2 / 2), (2.0, math.pi ** 2 / 3)])
def test_fiber_rule_volume(disk, mu, volume):
    rule = radial_rule(disk, 6, fiber=(mu, 1))
    assert rule.dim == 2
    assert rule.total_weight == pytest.approx(volume, rel=1e-12)


def test_fiber_rule_moment(disk):
    # over the unit ball of C²: ∫ |w|² dλ = π²/6
    rule = radial_rule(disk, 6, fiber=(1.0, 1))
    value, _ = integrate(lambda p: np.abs(p[:, 1]) ** 2, rule)
    assert value == pytest.approx(math.pi ** 2 / 6, rel=1e-12)


def test_radial_rule_needs_a_ball(typeIV3):
    with pytest.raises(UnsupportedError):
        radial_rule(typeIV3, 4)


def test_monte_carlo_estimate_within_stderr(disk):
    samples = sample_interior(disk, 20000, seed=4)
    value, stderr = integrate(lambda p: np.abs(p[:, 0]) ** 2, samples)
    assert stderr > 0
    assert abs(value - math.pi / 2) < 4 * stderr


def test_summation_is_order_independent(disk):
    samples = sample_interior(disk, 5000, seed=9)
    perm = np.random.default_rng(0).permutation(len(samples))
    shuffled = SampleSet(samples.points[perm], samples.weights[perm], seed=samples.seed)

    def f(p):
        return np.cos(7 * p[:, 0].real) + 1e8 * np.abs(p[:, 0]) ** 3

    assert integrate(f, samples)[0] == integrate(f, shuffled)[0]


def test_non_finite_integrand_names_the_node(disk):
    samples = sample_interior(disk, 10, seed=1)

    def f(p):
        out = np.ones(len(p))
        out[3] = np.nan
        return out

    with pytest.raises(IntegrandError) as info:
        integrate(f, samples)
    assert info.value.index == 3


@pytest.mark.parametrize("m", [1, 3])
def test_norm_powers_over_the_disk(disk, m):
    samples = sample_interior(disk, 20000, seed=6)
    value, stderr = integrate(lambda p: generic_norm(disk, p) ** m, samples)
    assert abs(value - math.pi / (m + 1)) <= 3 * stderr


def test_zero_integrand_is_exactly_zero(disk):
    samples = sample_interior(disk, 1000, seed=6)
    assert integrate(lambda p: np.zeros(len(p)), samples) == (0.0, 0.0)
