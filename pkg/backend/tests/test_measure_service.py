"""Tests for log-concave measures, restrictions and sampled validation."""
import math

import numpy as np
import pytest

from app.core.exceptions import MeasureError, MeasureValidationWarning
from app.models.measure import MeasureFlags
from app.schemas.experiment_schema import MeasureKind, MeasureSpec
from app.services.body_service import body_service
from app.services.integration_service import integration_service
from app.services.measure_service import measure_service


def test_gaussian_density_at_origin(gaussian2):
    assert gaussian2.density_at(np.zeros(2))[0] == pytest.approx(1.0 / (2.0 * math.pi))
    assert gaussian2.flags.unconditional
    assert gaussian2.radial is not None


def test_anisotropic_gaussian_has_no_radial_profile():
    assert measure_service.make_gaussian([1.0, 2.0]).radial is None


def test_gaussian_sample_mean():
    mu = measure_service.make_gaussian([1.0, 1.0])
    X = mu.sampler(np.random.default_rng(0), 200_000)
    # 5 standard errors at 2e5 draws
    assert np.all(np.abs(X.mean(axis=0)) < 5.0 / math.sqrt(200_000))


def test_product_exponential_density_and_cube_mass():
    mu = measure_service.make_product_exponential([1.0, 1.0])
    assert mu.density_at(np.zeros(2))[0] == pytest.approx(0.25)
    mass = integration_service.measure_quadrature(mu, body_service.make_cube(2), 1e-8)
    assert mass.value == pytest.approx((1.0 - math.exp(-1.0)) ** 2, rel=1e-6)


def test_lebesgue_box_mass_and_cube(cube2):
    mu = measure_service.make_lebesgue([2.0, 2.0])
    assert mu.total_mass == pytest.approx(16.0)
    assert integration_service.measure_quadrature(mu, cube2).value == pytest.approx(4.0, rel=1e-9)


def test_lebesgue_rejects_asymmetric_box():
    with pytest.raises(MeasureError):
        measure_service.make_lebesgue([[-1.0, 2.0], [-1.0, 1.0]])


def test_nonpositive_parameters_are_rejected():
    with pytest.raises(MeasureError):
        measure_service.make_gaussian([1.0, 0.0])
    with pytest.raises(MeasureError):
        measure_service.make_product_exponential([-1.0], dim=2)


def test_uniform_on_body(cube2, diamond2, sheared_square):
    on_cube = measure_service.make_uniform_on_body(cube2)
    on_box = measure_service.make_lebesgue([1.0, 1.0])
    points = np.array([[0.2, -0.9], [1.2, 0.0], [0.0, 0.0]])
    np.testing.assert_array_equal(on_cube.log_density_at(points), on_box.log_density_at(points))
    assert measure_service.make_uniform_on_body(diamond2).total_mass == pytest.approx(2.0)
    with pytest.raises(MeasureError):
        measure_service.make_uniform_on_body(sheared_square)


def test_uniform_on_diamond_sampler_stays_inside(diamond2):
    mu = measure_service.make_uniform_on_body(diamond2)
    X = mu.sampler(np.random.default_rng(1), 5000)
    assert X.shape == (5000, 2)
    assert np.all(np.abs(X).sum(axis=1) <= 1.0 + 1e-12)


def test_custom_log_concave_density_validates():
    mu = measure_service.make_custom(
        lambda x: -np.linalg.norm(x),
        MeasureFlags(even=True, unconditional=True),
        box=[3.0, 3.0]
    )
    result = measure_service.validate(mu, samples=500)
    assert result.passed


def test_custom_convex_density_warns():
    with pytest.warns(MeasureValidationWarning):
        measure_service.make_custom(
            lambda x: float(np.dot(x, x)),
            MeasureFlags(even=True, unconditional=True),
            box=[3.0, 3.0]
        )


def test_custom_unconditional_flip_check_passes():
    mu = measure_service.make_custom(
        lambda X: -np.max(np.abs(X), axis=1),
        MeasureFlags(even=True, unconditional=True),
        box=[2.0, 2.0],
        vectorized=True,
        validate=False
    )
    assert measure_service.validate(mu, samples=500).flip_failures == 0


def test_custom_measure_with_wrong_flag_warns():
    with pytest.warns(MeasureValidationWarning):
        measure_service.make_custom(
            lambda x: -(x[0] - x[1]) ** 2,
            MeasureFlags(even=True, unconditional=True),
            box=[2.0, 2.0]
        )


def test_flag_consistency():
    with pytest.raises(MeasureError):
        MeasureFlags(even=False, unconditional=True)


def test_restrict_fiber_of_gaussian(gaussian2):
    fiber = measure_service.restrict_fiber(gaussian2, 0, [0.0])
    t = np.array([-1.0, 0.0, 0.5])
    expected = np.exp(-0.5 * t ** 2) / (2.0 * math.pi)
    np.testing.assert_allclose(fiber.density(t), expected, rtol=1e-12)


def test_restrict_fiber_of_lebesgue_box():
    mu = measure_service.make_lebesgue([1.0, 1.0])
    fiber = measure_service.restrict_fiber(mu, 0, [0.5])
    np.testing.assert_array_equal(fiber.density(np.array([-1.0, 0.3, 1.0, 1.2])), [1.0, 1.0, 1.0, 0.0])
    outside = measure_service.restrict_fiber(mu, 0, [1.5])
    assert np.all(np.isneginf(outside.log_density_1d(np.linspace(-1.0, 1.0, 5))))


def test_restrict_slice_drops_one_dimension(gaussian2):
    section = measure_service.restrict_slice(gaussian2, 1, 0.0)
    assert section.dim == 1
    assert section.flags.unconditional
    assert section.density_at(np.zeros(1))[0] == pytest.approx(1.0 / (2.0 * math.pi))


def test_correlated_gaussian_is_even_but_not_unconditional():
    mu = measure_service.make_correlated_gaussian([[1.0, 0.6], [0.6, 1.0]])
    assert mu.flags.even
    assert not mu.flags.unconditional
    x = np.array([[0.4, -0.7]])
    assert mu.log_density_at(x)[0] == pytest.approx(mu.log_density_at(-x)[0])
    assert mu.log_density_at(x)[0] != pytest.approx(mu.log_density_at(x * [1.0, -1.0])[0])


def test_from_spec_builds_measures():
    mu = measure_service.from_spec(MeasureSpec(kind=MeasureKind.GAUSSIAN, params=[2.0], id="g2"), 3)
    assert mu.dim == 3
    assert mu.measure_id == "g2"
    box = measure_service.from_spec(MeasureSpec(kind=MeasureKind.LEBESGUE_BOX, params=[1.5]), 2)
    assert box.total_mass == pytest.approx(9.0)
    with pytest.raises(MeasureError):
        measure_service.from_spec(MeasureSpec(kind=MeasureKind.CORRELATED_GAUSSIAN), 2)
