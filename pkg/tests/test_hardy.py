import math

import numpy as np
import pytest
from scipy.special import gamma

from models import HartogsParams, HartogsPoint, MonomialBasis, TypeI
from utils.domains import generic_norm, make_domain, sample_interior
from utils.errors import (
    BoundaryError,
    GridError,
    NearBoundaryError,
    PreconditionError,
    UnsupportedError,
)
from utils.hardy import (
    SERIES_DEGREE_MC,
    b_polynomial,
    ball_monomial_norms,
    base_density,
    base_gram,
    boundary_limit,
    default_b_coefficients,
    default_series_degree,
    epsilon_base,
    evaluate_szego,
    fit_b_coefficients,
    fit_log_term,
    fourier_inner_product,
    hat_map_value,
    is_admissible,
    isometry_ratio,
    log_term_fit,
    planted_log_fixture,
    smallest_admissible,
    szego_closed,
    szego_series,
)
from utils.hartogs import boundary_point, sample_boundary
from utils.quadrature import integrate, radial_rule


def monomial(k):
    return lambda z: np.asarray(z)[..., 0] ** k


# ---------------- weighted Bergman spaces ----------------
def test_ball_monomial_norms(disk):
    basis = MonomialBasis.up_to(1, 3)
    norms = ball_monomial_norms(disk, 1.0, 3, basis)
    # ‖z^k‖² = k!/(k+2)! for the disk with μ = 1, m = 3
    np.testing.assert_allclose(norms, [1 / 2, 1 / 6, 2 / 24, 6 / 120], rtol=1e-13)


def test_admissibility(disk):
    assert not is_admissible(disk, 1.0, 1)
    assert is_admissible(disk, 1.0, 2)
    with pytest.raises(PreconditionError):
        base_gram(disk, 1.0, 1, MonomialBasis.up_to(1, 2))


@pytest.mark.parametrize("m", [2, 3, 7])
def test_disk_epsilon(disk, m):
    basis = MonomialBasis.up_to(1, 40)
    gram = base_gram(disk, 1.0, m, basis)
    for z in (0.0, 0.1 + 0.1j, -0.2j):
        assert epsilon_base(disk, 1.0, m, [z], gram) == pytest.approx(m - 1, rel=1e-10)


@pytest.mark.parametrize("mu,m", [(1.0, 4), (2.0, 3), (1.5, 5)])
def test_ball_epsilon(ball2, mu, m):
    basis = MonomialBasis.up_to(2, 40)
    gram = base_gram(ball2, mu, m, basis)
    expected = mu ** -2 * gamma(mu * m) / gamma(mu * m - 2)
    assert epsilon_base(ball2, mu, m, [0.1, 0.05j], gram) == pytest.approx(expected, rel=1e-9)


def test_monte_carlo_and_radial_grams_match_the_exact_norms(disk):
    basis = MonomialBasis.up_to(1, 3)
    exact = ball_monomial_norms(disk, 1.0, 3, basis)
    radial = base_gram(disk, 1.0, 3, basis, quad=radial_rule(disk, 12))
    np.testing.assert_allclose(radial.gram, exact, rtol=1e-5)

    quad = sample_interior(disk, 20000, seed=5)
    mc = base_gram(disk, 1.0, 3, basis, quad=quad)
    # one monomial per degree, so the graded Gram is diagonal
    assert np.all(mc.gram[~np.eye(4, dtype=bool)] == 0)
    weight = generic_norm(disk, quad.points) ** 3 * base_density(disk, 1.0, quad.points) / math.pi
    for k, norm in enumerate(exact):
        value, stderr = integrate(lambda p, k=k: np.abs(p[:, 0]) ** (2 * k) * weight, quad)
        assert mc.gram[k, k].real == pytest.approx(value, rel=1e-12)
        assert abs(value - norm) <= 3 * stderr


@pytest.mark.parametrize("kind,mu,expected", [
    ("disk", 1.0, [-2.0, 1.0]),
    ("disk", 2.0, [-1.5, 1.0]),
    ("ball2", 1.0, [6.0, -6.0, 2.0]),
])
def test_b_coefficients(kind, mu, expected, request):
    spec = request.getfixturevalue(kind)
    b = fit_b_coefficients(spec, mu)
    np.testing.assert_allclose(b, expected, atol=1e-6)
    assert b_polynomial(b, 5) == pytest.approx(epsilon_base(
        spec, mu, 5, np.full(spec.dim, 0.1), base_gram(spec, mu, 5, MonomialBasis.up_to(spec.dim, 40))), rel=1e-6)


def test_b_coefficients_grid_must_match_dimension(disk):
    with pytest.raises(GridError):
        fit_b_coefficients(disk, 1.0, m_grid=[2, 3, 4])


@pytest.mark.parametrize("kind,mu", [("disk", 1.0), ("ball2", 1.5), ("ball2", 2.0)])
def test_epsilon_follows_the_b_polynomial_off_the_grid(kind, mu, request):
    spec = request.getfixturevalue(kind)
    b = fit_b_coefficients(spec, mu)
    assert b[-1] > 0
    basis = MonomialBasis.up_to(spec.dim, 40)
    m0 = smallest_admissible(spec, mu)
    z = np.full(spec.dim, 0.1)
    for m in range(m0 + spec.dim + 1, m0 + spec.dim + 5):
        eps = epsilon_base(spec, mu, m, z, base_gram(spec, mu, m, basis))
        assert abs(b_polynomial(b, m) - eps) < 1e-5 * abs(eps)


# ---------------- hat map ----------------
def test_hat_map_needs_a_boundary_point(disk):
    with pytest.raises(BoundaryError):
        hat_map_value(disk, 1.0, 3, monomial(0), HartogsPoint([0.1], [0.2]))
    v = boundary_point(HartogsParams(disk, 1.0, 1), [0.6], 0.0)
    assert hat_map_value(disk, 1.0, 2, monomial(1), v) == pytest.approx(2 ** -0.5 * 0.64 ** -1 * 0.64 * 0.6)


@pytest.fixture(scope="module")
def disk_boundary():
    return sample_boundary(HartogsParams(make_domain(TypeI(1, 1)), 1.0, 1), 20000, seed=7)


def test_hat_map_is_an_isometry(disk, disk_boundary):
    ratios = [isometry_ratio(disk, 1.0, m, monomial(k), disk_boundary) for m in (3, 4, 5) for k in (0, 1, 2)]
    np.testing.assert_allclose(ratios, 1.0, rtol=0.02)
    assert max(ratios) / min(ratios) - 1 < 0.02


def test_isometry_with_independent_base_nodes(disk, disk_boundary):
    shared = isometry_ratio(disk, 1.0, 4, monomial(1), disk_boundary)
    ratio = isometry_ratio(disk, 1.0, 4, monomial(1), disk_boundary, sample_interior(disk, 20000, seed=8))
    assert ratio == pytest.approx(1.0, rel=0.05)
    assert ratio != shared


def test_fourier_modes_are_orthogonal(disk, disk_boundary):
    value, stderr = fourier_inner_product(disk, 1.0, 3, monomial(0), 4, monomial(0), disk_boundary)
    assert stderr > 0
    assert abs(value) <= 4 * stderr
    same, _ = fourier_inner_product(disk, 1.0, 3, monomial(1), 3, monomial(1), disk_boundary)
    assert same.real > 10 * stderr


def test_hardy_space_needs_one_fibre(disk):
    with pytest.raises(UnsupportedError):
        szego_closed(HartogsParams(disk, 1.0, 2), HartogsPoint([0.0], [0.1, 0.1]))


# ---------------- Szegő kernel ----------------
@pytest.mark.parametrize("t", [0.1, 0.3, 0.6])
def test_disk_closed_form_at_the_origin(disk_bundle, t):
    v = HartogsPoint([0.0], [math.sqrt(t)])
    assert szego_closed(disk_bundle, v) == pytest.approx(0.5 * (2 * t - 1) / (1 - t) ** 2, rel=1e-6)


@pytest.mark.parametrize("mu", [1.0, 2.0])
@pytest.mark.parametrize("kind", ["disk", "ball2"])
def test_series_agrees_with_closed_form(kind, mu, request):
    spec = request.getfixturevalue(kind)
    params = HartogsParams(spec, mu, 1)
    rng = np.random.default_rng(21)
    for _ in range(10):
        z = 0.2 * rng.random(spec.dim) * np.exp(2j * np.pi * rng.random(spec.dim)) / math.sqrt(spec.dim)
        N = 1 - np.sum(np.abs(z) ** 2)
        x = 0.8 * rng.random()
        v = HartogsPoint(z, [math.sqrt(x * N ** mu)])
        ev = evaluate_szego(params, v)
        assert ev.series_value == pytest.approx(ev.closed_value, rel=1e-6)
        assert ev.tail_estimate <= 1e-8 * abs(ev.series_value) + 1e-300


def test_series_refuses_points_near_the_boundary(disk_bundle):
    with pytest.raises(NearBoundaryError):
        szego_series(disk_bundle, HartogsPoint([0.0], [math.sqrt(0.999)]))


def test_monte_carlo_bases_default_to_a_small_degree(typeIV3, ball2):
    assert default_series_degree(typeIV3) == SERIES_DEGREE_MC
    assert default_series_degree(ball2) > SERIES_DEGREE_MC
    assert default_series_degree(ball2, sample_interior(ball2, 10, seed=0)) == SERIES_DEGREE_MC


def test_monte_carlo_basis_shrinks_with_the_effective_node_count(typeIV3):
    basis = MonomialBasis.up_to(3, 40)
    # N^{57} leaves only a handful of nodes near the origin with real weight
    gram = base_gram(typeIV3, 1.0, 60, basis)
    assert set(gram.basis.exponents) < set(basis.exponents)
    assert gram.basis.degrees.max() <= 2
    assert epsilon_base(typeIV3, 1.0, 60, np.zeros(3), gram) > 0


def test_szego_on_a_non_ball_base(typeIV3):
    params = HartogsParams(typeIV3, 1.0, 1)
    b = default_b_coefficients(typeIV3, 1.0)
    assert len(b) == 4
    assert b[-1] > 0
    assert math.isfinite(szego_closed(params, HartogsPoint([0.0, 0.0, 0.0], [0.5])))
    v = HartogsPoint([0.05, 0.0, 0.0], [0.3])
    series, tail = szego_series(params, v)
    assert series == pytest.approx(szego_closed(params, v), rel=1e-3)
    assert tail <= 1e-8 * abs(series)
    fit = log_term_fit(params, [0.1, 0.0, 0.0])
    assert abs(fit.b_estimate) < 1e-6 * abs(fit.a_estimate) * min(fit.grid) ** -4


# ---------------- log term ----------------
@pytest.mark.parametrize("d", [1, 2, 3])
def test_planted_log_is_recovered(d):
    t = np.geomspace(1e-3, 1e-1, 24)
    fit = fit_log_term(t, planted_log_fixture(d, beta=0.1)(t), d)
    assert fit.b_estimate == pytest.approx(0.1, abs=1e-6)
    assert fit.a_estimate == pytest.approx(1.0, rel=1e-6)


def test_log_term_grid_errors():
    with pytest.raises(GridError):
        fit_log_term([0.1, 0.2, 0.3], [1, 2, 3], 1)
    t = np.linspace(0.05, 0.1, 12)
    with pytest.raises(GridError):
        fit_log_term(t, t ** -2, 1)


@pytest.mark.parametrize("mu", [1.0, 2.0])
@pytest.mark.parametrize("kind", ["disk", "ball2"])
def test_log_term_vanishes(kind, mu, request):
    spec = request.getfixturevalue(kind)
    params = HartogsParams(spec, mu, 1)
    z = np.full(spec.dim, 0.1 + 0.05j)
    fit = log_term_fit(params, z)
    t_min = min(fit.grid)
    assert abs(fit.b_estimate) < 1e-6 * abs(fit.a_estimate) * t_min ** -(spec.dim + 1)
    assert fit.residual < 1e-8


def test_log_term_grid_must_stay_inside(disk_bundle):
    with pytest.raises(GridError):
        log_term_fit(disk_bundle, [0.5], radial_grid=np.geomspace(1e-3, 2.0, 12))


@pytest.mark.parametrize("kind,mu", [("disk", 1.0), ("ball2", 1.0), ("disk", 2.0)])
def test_boundary_limit(kind, mu, request):
    spec = request.getfixturevalue(kind)
    params = HartogsParams(spec, mu, 1)
    b = default_b_coefficients(spec, mu)
    limit = boundary_limit(params, np.full(spec.dim, 0.2), b=b)
    assert limit["expected"] == pytest.approx(2.0 ** -spec.dim * b[-1])
    assert limit["max_rel_dev"] < 1e-4
