import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models import HartogsParams, HartogsPoint, TypeIV
from utils.calculus import metric_base
from utils.domains import generic_norm, make_domain, sample_interior
from utils.errors import OutsideDomainError, PreconditionError, ShapeError, UnsupportedError
from utils.hartogs import (
    boundary_constant_report,
    boundary_nodes,
    boundary_sample_set,
    hermitian_weight,
    metric_hartogs,
    nominal_boundary_constant,
    rho,
    sample_boundary,
    sample_hartogs_interior,
    volume_density,
)


def test_rho_values(disk_bundle):
    assert rho(disk_bundle, HartogsPoint([0.0], [0.0])) == pytest.approx(1.0)
    assert rho(disk_bundle, HartogsPoint([0.5], [0.5])) == pytest.approx(0.5)


def test_hermitian_weight(disk_bundle):
    v = HartogsPoint([0.5], [0.5])
    assert hermitian_weight(disk_bundle, 0, v) == 1.0
    assert hermitian_weight(disk_bundle, 3, v) == pytest.approx(0.125)


def test_rho_rejects_bad_points(disk_bundle):
    with pytest.raises(OutsideDomainError):
        rho(disk_bundle, HartogsPoint([1.2], [0.0]))
    with pytest.raises(ShapeError):
        rho(disk_bundle, HartogsPoint([0.1, 0.1], [0.0]))
    with pytest.raises(OutsideDomainError):
        hermitian_weight(disk_bundle, 2, HartogsPoint([0.0], [1.5]))


@given(st.floats(min_value=0.0, max_value=2 * math.pi), st.floats(min_value=0.0, max_value=2 * math.pi))
@settings(max_examples=25, deadline=None)
def test_rho_only_sees_the_fibre_norm(phase, angle):
    params = HartogsParams(make_domain(TypeIV(3)), 1.5, 2)
    z = np.array([0.2, 0.1j, -0.1])
    w = np.array([0.3 + 0.1j, -0.2j])
    rotated = np.exp(1j * phase) * np.array([np.cos(angle) * w[0] - np.sin(angle) * w[1],
                                             np.sin(angle) * w[0] + np.cos(angle) * w[1]])
    assert rho(params, HartogsPoint(z, rotated)) == pytest.approx(rho(params, HartogsPoint(z, w)), rel=1e-12)


def test_params_validation(disk):
    with pytest.raises(PreconditionError):
        HartogsParams(disk, 0.0, 1)
    with pytest.raises(PreconditionError):
        HartogsParams(disk, 1.0, 0)


def test_disk_bundle_is_the_unit_ball(disk_bundle):
    # ρ = 1 − |z|² − |w|², so det(−∂∂̄ log ρ) = ρ^{−3}
    v = HartogsPoint([0.3], [0.2j])
    r = 1 - 0.09 - 0.04
    assert volume_density(disk_bundle, v) == pytest.approx(r ** -3, rel=1e-6)


def test_metric_is_positive_definite(typeIV3):
    params = HartogsParams(typeIV3, 1.5, 2)
    z = 0.3 * sample_interior(typeIV3, 5, seed=1).points
    w = np.full((5, 2), 0.1 + 0.05j)
    g = metric_hartogs(params, HartogsPoint(z, w))
    assert g.shape == (5, 5, 5)
    assert np.all(np.linalg.eigvalsh(g) > 0)


@pytest.mark.parametrize("mu", [1.0, 2.5])
def test_metric_restricts_to_the_base_over_the_zero_section(typeIV3, mu):
    params = HartogsParams(typeIV3, mu, 2)
    z = 0.3 * sample_interior(typeIV3, 5, seed=1).points
    g = metric_hartogs(params, HartogsPoint(z, np.zeros((5, 2))))
    np.testing.assert_allclose(g[:, :3, :3], metric_base(typeIV3, mu, z), atol=1e-10)


def test_boundary_samples_on_the_disk_bundle(disk_bundle):
    samples = sample_boundary(disk_bundle, 2000, seed=3)
    assert len(samples) == 2000
    np.testing.assert_allclose(samples.kappa, 2.0, rtol=1e-6)
    # total contact measure of the unit sphere in C²
    assert np.sum(samples.weights) == pytest.approx(4 * math.pi ** 2, rel=1e-6)
    v = boundary_nodes(samples)
    np.testing.assert_allclose(v.w_norm2, generic_norm(disk_bundle.base, v.z), rtol=1e-12)
    assert boundary_sample_set(samples).total_weight == pytest.approx(2.0, rel=1e-6)
    first = samples[0]
    assert first.weight == pytest.approx(samples.weights[0])


def test_boundary_sampling_is_deterministic(disk_bundle):
    a = sample_boundary(disk_bundle, 100, seed=5)
    b = sample_boundary(disk_bundle, 100, seed=5)
    np.testing.assert_array_equal(a.theta, b.theta)
    np.testing.assert_array_equal(a.weights, b.weights)


def test_boundary_sampling_needs_one_fibre(disk):
    with pytest.raises(UnsupportedError):
        sample_boundary(HartogsParams(disk, 1.0, 2), 10, seed=0)


def test_interior_samples_of_the_bundle(disk_bundle):
    samples = sample_hartogs_interior(disk_bundle, 20000, seed=2)
    v = HartogsPoint.from_coords(samples.points, 1)
    assert np.all(np.asarray(rho(disk_bundle, v)) > 0)
    assert samples.total_weight == pytest.approx(math.pi ** 2 / 2, rel=0.03)


def test_boundary_constant_report_on_the_disk(disk_bundle):
    samples = sample_interior(disk_bundle.base, 100, seed=1, min_norm=0.1)
    report = boundary_constant_report(disk_bundle, samples)
    assert report["measured"] == pytest.approx(2.0, rel=1e-6)
    assert report["nominal"] == pytest.approx(nominal_boundary_constant(disk_bundle))
    assert nominal_boundary_constant(disk_bundle) == pytest.approx(1.0)
    assert report["discrepancy"] == pytest.approx(2.0, rel=1e-6)
    assert report["deviation"] < 1e-4
