"""Tests for volume products and the inequality checks."""
import math

import numpy as np
import pytest

from app.core.exceptions import ConfigError, GeometryError, MeasureError
from app.schemas.estimate_schema import EstimateMethod, VerificationReport, VolumeEstimate
from app.services.body_service import body_service
from app.services.integration_service import integration_service
from app.services.measure_service import measure_service
from app.services.storage_service import storage_service
from app.services.verification_service import verification_service

GAUSSIAN_DISK_SQUARED = (1.0 - math.exp(-0.5)) ** 2


def test_report_compare_uses_error_slack():
    lhs = VolumeEstimate(value=1.0 + 1e-4, method=EstimateMethod.QUADRATURE, err=1e-4)
    report = VerificationReport.compare("main", lhs, VolumeEstimate.exact(1.0), 2)
    assert report.margin == pytest.approx(-1e-4)
    assert report.slack == pytest.approx(3e-4 + 1e-9)
    assert report.passed
    worse = VerificationReport.compare("main", VolumeEstimate.exact(1.1), VolumeEstimate.exact(1.0), 2)
    assert not worse.passed


def test_exact_estimates_carry_no_error():
    with pytest.raises(ValueError):
        VolumeEstimate(value=1.0, method=EstimateMethod.EXACT, err=0.1)


def test_volume_product_of_cube_is_exact(cube2):
    product = verification_service.volume_product(cube2)
    assert product.value == pytest.approx(8.0, abs=1e-12)
    assert product.method == EstimateMethod.EXACT
    assert product.err == 0.0


def test_volume_product_of_ball():
    product = verification_service.volume_product(body_service.make_ball(2))
    assert product.value == pytest.approx(math.pi ** 2)
    assert product.method == EstimateMethod.EXACT


def test_volume_product_of_octahedron():
    product = verification_service.volume_product(body_service.make_cross_polytope(3))
    assert product.value == pytest.approx(8.0 * 4.0 / 3.0, abs=1e-12)


def test_santalo_on_cube(cube2):
    report = verification_service.verify_santalo_lebesgue(cube2, "cube2d")
    assert report.passed
    assert report.rhs.value == pytest.approx(math.pi ** 2)
    assert report.margin == pytest.approx(math.pi ** 2 - 8.0)


def test_santalo_on_fine_polygon_is_nearly_tight():
    report = verification_service.verify_santalo_lebesgue(body_service.make_regular_polygon(128))
    assert report.passed
    assert 0.0 <= report.margin <= 0.01 * math.pi ** 2


def test_section_product_with_small_cube(cube2):
    # both K and K^o contain the cube of half-width 1/2
    product = verification_service.volume_product(cube2, L=body_service.make_cube(2, 0.5))
    assert product.value == pytest.approx(1.0, abs=1e-12)


def test_monte_carlo_product_agrees_with_quadrature(gaussian2, cube2):
    quad = verification_service.volume_product(cube2, gaussian2, tol=1e-7)
    mc = verification_service.volume_product(
        cube2, gaussian2, engine=EstimateMethod.MONTE_CARLO, samples=200_000, seed=4
    )
    assert mc.method == EstimateMethod.MONTE_CARLO
    assert abs(quad.value - mc.value) <= 5.0 * (quad.err + mc.err)


def test_main_on_cube(gaussian2, cube2):
    report = verification_service.verify_main(gaussian2, cube2, body_id="cube2d")
    assert report.passed
    assert report.rhs.value == pytest.approx(GAUSSIAN_DISK_SQUARED, rel=1e-12)
    assert report.rhs.value == pytest.approx(0.154818, abs=1e-6)
    assert report.lhs.value < report.rhs.value


def test_main_is_tight_for_the_ball(gaussian2):
    report = verification_service.verify_main(gaussian2, body_service.make_ball(2))
    assert report.passed
    assert report.margin == pytest.approx(0.0, abs=1e-12)


def test_main_rejects_non_unconditional_measure(cube2):
    mu = measure_service.make_correlated_gaussian([[1.0, 0.5], [0.5, 1.0]])
    with pytest.raises(MeasureError):
        verification_service.verify_main(mu, cube2)


def test_claim1_on_sheared_square(gaussian2, sheared_square):
    reports = verification_service.verify_claim1(gaussian2, sheared_square, 0, body_id="sheared")
    assert [r.inequality_id for r in reports] == [
        "claim1_body_axis1", "claim1_polar_axis1", "claim1_product_axis1",
    ]
    assert all(r.passed for r in reports)
    assert reports[0].margin > 0.0


def test_chain_on_sheared_square(gaussian2, sheared_square):
    reports = verification_service.verify_chain(gaussian2, sheared_square, body_id="sheared")
    assert len(reports) == 1
    assert reports[0].inequality_id == "chain_step1"
    assert reports[0].context["axis"] == 2
    assert reports[0].passed
    assert reports[0].context["unconditional"]


def test_chain_in_three_dimensions():
    # |x3| <= 1, |x2 - x3| <= 1, |x1 - x2| <= 1
    K = body_service.make_hpolytope(
        [[0, 0, 1], [0, 0, -1], [0, 1, -1], [0, -1, 1], [1, -1, 0], [-1, 1, 0]], symmetric=True
    )
    mu = measure_service.make_gaussian([1.0], dim=3)
    reports = verification_service.verify_chain(mu, K, tol=1e-5, body_id="sheared_cube")
    assert [r.inequality_id for r in reports] == ["chain_step1", "chain_step2"]
    assert [r.context["axis"] for r in reports] == [3, 2]
    assert all(r.passed for r in reports)
    assert reports[-1].context["unconditional"]


UNCONDITIONAL_MEASURES = [
    measure_service.make_product_exponential([1.0, 1.0]),
    measure_service.make_lebesgue([3.0, 3.0]),
]


@pytest.mark.parametrize("mu", UNCONDITIONAL_MEASURES, ids=lambda mu: mu.measure_id)
def test_claim1_under_other_measures(mu, sheared_square):
    for axis in (0, 1):
        reports = verification_service.verify_claim1(mu, sheared_square, axis, tol=1e-7)
        assert all(r.passed for r in reports)


@pytest.mark.parametrize("mu", UNCONDITIONAL_MEASURES, ids=lambda mu: mu.measure_id)
def test_claim1_is_an_equality_on_unconditional_bodies(mu, cube2, diamond2):
    for K in (cube2, diamond2):
        reports = verification_service.verify_claim1(mu, K, 0, tol=1e-7)
        assert all(r.passed for r in reports)
        assert all(abs(r.margin) <= r.slack for r in reports)


@pytest.mark.parametrize("mu", UNCONDITIONAL_MEASURES, ids=lambda mu: mu.measure_id)
def test_chain_and_main_under_other_measures(mu, sheared_square, cube2):
    chain = verification_service.verify_chain(mu, sheared_square, tol=1e-7)
    assert all(r.passed for r in chain)
    for K in (sheared_square, cube2):
        assert verification_service.verify_main(mu, K, tol=1e-7).passed


def test_main_on_lebesgue_box_is_santalo_in_the_box(cube2):
    # the cube and its polar sit inside [-3, 3]^2, so P_mu = 4 * 2 and mu(B)^2 = pi^2
    report = verification_service.verify_main(measure_service.make_lebesgue([3.0, 3.0]), cube2, tol=1e-8)
    assert report.lhs.value == pytest.approx(8.0, rel=1e-7)
    assert report.rhs.value == pytest.approx(math.pi ** 2, rel=1e-7)


def test_santalo_verdict_survives_linear_images():
    K = body_service.as_integrable(body_service.random_symmetric_polytope(2, 5, 9))
    T = body_service.linear_image(K, [[2.0, 1.0], [0.5, 3.0]])
    before = verification_service.verify_santalo_lebesgue(K)
    after = verification_service.verify_santalo_lebesgue(T)
    assert before.passed and after.passed
    assert after.lhs.value == pytest.approx(before.lhs.value, rel=1e-9)


def test_corollary_on_cube(cube2):
    report = verification_service.verify_corollary_inclusion(cube2, samples=5000, seed=1)
    assert report.passed
    assert report.lhs.value <= 1.0 + 1e-12
    assert len(report.context["x"]) == 2


def test_corollary_requires_unconditional_body(sheared_square):
    with pytest.raises(GeometryError):
        verification_service.verify_corollary_inclusion(sheared_square, samples=100)


@pytest.mark.parametrize("fraction", [0.0, 0.5, 0.9])
def test_meyer_pajor_on_sheared_square(sheared_square, fraction):
    extent = body_service.enclosing_box(body_service.polar_h(sheared_square))[0, 1]
    report = verification_service.verify_meyer_pajor(sheared_square, 0, fraction * extent, samples=2000, seed=3)
    assert report.passed
    assert report.inequality_id == "meyer_pajor_axis1"


def test_meyer_pajor_outside_polar_is_vacuous(cube2):
    report = verification_service.verify_meyer_pajor(cube2, 0, 2.0, samples=100)
    assert report.passed
    assert report.context["vacuous"]


def test_prop8_on_nested_cubes(gaussian2, cube2):
    report = verification_service.verify_prop8(gaussian2, cube2, body_service.make_cube(2, 2.0), tol=1e-5)
    assert report.passed
    # the mean of the two cubes is the cube of half-width sqrt(2)
    assert report.rhs.value <= math.erf(1.0) ** 4 + 1e-4
    assert report.rhs.value == pytest.approx(math.erf(1.0) ** 4, rel=1e-2)


def test_prop8_on_nested_cubes_is_tight_for_lebesgue(cube2):
    # 4 * 16 on the left, area 8 of the sqrt(2)-cube squared on the right
    mu = measure_service.make_lebesgue([3.0, 3.0])
    report = verification_service.verify_prop8(mu, cube2, body_service.make_cube(2, 2.0), tol=1e-8)
    assert report.passed
    assert report.lhs.value == pytest.approx(64.0, rel=1e-9)
    assert report.margin == pytest.approx(0.0, abs=1e-6)


def test_prop8_is_limited_to_low_dimension():
    mu = measure_service.make_gaussian([1.0], dim=4)
    K = body_service.make_cube(4)
    with pytest.raises(GeometryError):
        verification_service.verify_prop8(mu, K, K)


@pytest.mark.parametrize("mu", [
    measure_service.make_gaussian([1.0, 1.0]),
    measure_service.make_lebesgue([3.0, 3.0]),
])
def test_ball_logconcavity(mu):
    report = verification_service.verify_ball_logconcavity(mu, [-1.0 + 0.25 * i for i in range(9)])
    assert report.passed
    assert report.body_id == "ball"
    assert len(report.context["m"]) == 9


def test_ball_logconcavity_rejects_bad_grid(gaussian2):
    with pytest.raises(ConfigError):
        verification_service.verify_ball_logconcavity(gaussian2, [0.0, 1.0])
    with pytest.raises(ConfigError):
        verification_service.verify_ball_logconcavity(gaussian2, [0.0, 1.0, 1.5])


def test_fiberwise_on_sheared_square(gaussian2, sheared_square):
    reports = verification_service.verify_fiberwise(gaussian2, sheared_square, 0, samples=8, slices=3, seed=2)
    assert [r.inequality_id for r in reports] == ["fiberwise_line_axis1", "fiberwise_slice_axis1"]
    assert all(r.passed for r in reports)


def test_b_property_on_cube(gaussian2, cube2):
    report = verification_service.verify_b_property(gaussian2, cube2, [-0.5, 0.0, 0.5, 1.0])
    assert report.passed
    assert report.context["triples"] == 2


def test_explore_with_correlated_gaussian(cube2):
    mu = measure_service.make_correlated_gaussian([[1.0, 0.5], [0.5, 1.0]])
    reports = verification_service.explore_even(mu, cube2, L=body_service.make_cube(2, 0.5))
    assert [r.inequality_id for r in reports] == ["explore_main", "explore_section"]
    assert all(r.exploratory for r in reports)


def test_run_item_for_santalo(cube2):
    payload = {
        "check": "santalo",
        "dim": 2,
        "seed": 17,
        "body_id": "cube2d",
        "body": storage_service.body_to_document(cube2, "cube2d").model_dump(mode="json", exclude_none=True),
    }
    rows = verification_service.run_item(payload)
    assert len(rows) == 1
    assert rows[0]["inequality_id"] == "santalo"
    assert rows[0]["passed"] is True
    assert rows[0]["seed"] == 17


def test_run_item_for_claim1_covers_every_axis(sheared_square):
    payload = {
        "check": "claim1",
        "dim": 2,
        "body_id": "sheared",
        "body": storage_service.body_to_document(sheared_square).model_dump(mode="json", exclude_none=True),
        "measure": {"kind": "gaussian", "params": [1.0]},
    }
    rows = verification_service.run_item(payload)
    assert len(rows) == 6
    assert {row["inequality_id"] for row in rows} == {
        f"claim1_{part}_axis{axis}" for part in ("body", "polar", "product") for axis in (1, 2)
    }
    assert all(row["passed"] for row in rows)


def test_measure_of_scaled_cube_matches_erf(gaussian2, cube2):
    doubled = body_service.scale(cube2, 2.0)
    estimate = integration_service.measure(gaussian2, doubled, 1e-8)
    assert estimate.value == pytest.approx(math.erf(math.sqrt(2.0)) ** 2, rel=1e-7)
    assert np.isfinite(estimate.err)


def test_ball_measure_profile_matches_closed_form(gaussian2):
    grid = [-1.0 + 0.25 * i for i in range(9)]
    report = verification_service.verify_ball_logconcavity(gaussian2, grid)
    expected = [1.0 - math.exp(-0.5 * math.exp(2.0 * t)) for t in grid]
    np.testing.assert_allclose(report.context["m"], expected, atol=1e-8)
