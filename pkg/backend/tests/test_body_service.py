"""Tests for body construction, gauges, polarity and slices."""
import numpy as np
import pytest

from app.core.exceptions import (
    DegenerateBodyError,
    GeometryError,
    SingularTransformError,
    UnboundedBodyError,
)
from app.models.geometry import HPolytope, VPolytope
from app.services.body_service import body_service
from app.services.integration_service import integration_service
from app.services.symmetrization_service import symmetrization_service
from app.utils import lp_utils
from app.utils.lp_utils import essential_rows, facet_candidates


def vertex_set(V: VPolytope):
    return sorted(tuple(round(float(c), 9) + 0.0 for c in row) for row in V.vertices)


def square_vertices():
    return body_service.make_vpolytope([[1, 1], [1, -1], [-1, 1], [-1, -1]])


def test_gauge_h_examples(cube2, diamond2):
    assert body_service.gauge_h(diamond2, [1.0, 0.0]) == pytest.approx(1.0)
    assert body_service.gauge_h(cube2, [0.0, 0.0]) == 0.0
    assert body_service.gauge_h(cube2, [3.0, -2.0]) == pytest.approx(3.0)


def test_gauge_v_examples():
    diamond = body_service.make_vpolytope([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert body_service.gauge_v(diamond, [0.5, 0.5]) == pytest.approx(1.0, abs=1e-9)
    assert body_service.gauge_v(diamond, [0.3, 0.1]) == pytest.approx(0.4, abs=1e-9)
    assert body_service.gauge_v(square_vertices(), [1.0, 1.0]) == pytest.approx(1.0, abs=1e-9)


def test_gauge_agrees_across_representations(sheared_square):
    V = body_service.vertices_of(sheared_square)
    points = np.array([[0.3, -0.2], [1.5, 0.9], [-2.0, 0.1]])
    for x in points:
        assert body_service.gauge(V, x) == pytest.approx(body_service.gauge(sheared_square, x), abs=1e-9)


def test_polar_of_diamond_is_cube(cube2):
    diamond = body_service.make_vpolytope([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert body_service.same_body(body_service.polar_v_to_h(diamond), cube2)


def test_polar_of_cube_is_diamond(diamond2):
    assert body_service.same_body(body_service.polar_v_to_h(square_vertices()), diamond2)


def test_polar_scaling_duality():
    V = body_service.make_vpolytope([[2, 0], [-2, 0], [0, 1], [0, -1]])
    H = body_service.polar_v_to_h(V)
    assert body_service.gauge_h(H, [0.5, 0.0]) == pytest.approx(1.0)


def test_polar_h_to_v_of_cube(cube2):
    V = body_service.polar_h_to_v(cube2)
    assert vertex_set(V) == [(-1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)]


def test_polar_h_to_v_ignores_duplicated_normal(cube2):
    doubled = body_service.make_hpolytope(np.vstack([cube2.normals, [[1.0, 0.0]]]), reduce=False)
    assert vertex_set(body_service.polar_h_to_v(doubled)) == vertex_set(body_service.polar_h_to_v(cube2))


def test_bipolar_is_identity(sheared_square):
    twice = body_service.polar_h(body_service.polar_h(sheared_square))
    assert body_service.same_body(twice, sheared_square)


def test_degenerate_vertex_set_is_rejected():
    with pytest.raises(DegenerateBodyError):
        body_service.make_vpolytope([[1, 0], [-1, 0]])


def test_intersect_examples(cube2, diamond2):
    assert body_service.same_body(body_service.intersect(cube2, cube2), cube2)
    assert body_service.same_body(body_service.intersect(cube2, diamond2), diamond2)


def test_intersect_cube_and_dilated_diamond_is_octagon(cube2):
    octagon = body_service.intersect(cube2, body_service.make_cross_polytope(2, 1.5))
    assert octagon.n_facets == 8
    assert len(body_service.vertices_of(octagon).vertices) == 8


def test_weakly_redundant_facets_are_dropped(cube2):
    # the diamond of radius 2 only touches the cube at its corners
    touching = body_service.intersect(cube2, body_service.make_cross_polytope(2, 2.0))
    assert body_service.same_body(touching, cube2)


def test_central_slice_of_cube():
    section = body_service.slice_h(body_service.make_cube(3), 2, 0.0)
    assert body_service.same_body(section, body_service.make_cube(2))


def test_slice_of_diamond_is_segment(diamond2):
    section = body_service.slice_h(diamond2, 1, 0.5)
    assert section.dim == 1
    np.testing.assert_allclose(body_service.enclosing_box(section), [[-0.5, 0.5]], atol=1e-12)


def test_slice_outside_body_is_empty(cube2):
    assert body_service.slice_h(cube2, 0, 1.5) is None


def test_off_center_slice_of_octahedron():
    section = body_service.slice_h(body_service.make_cross_polytope(3), 2, 0.5)
    assert isinstance(section, HPolytope)
    assert integration_service.volume_exact(section).value == pytest.approx(0.5)


def test_linear_image_scaling_multiplies_volume(cube2):
    image = body_service.linear_image(cube2, 2.0 * np.eye(2))
    assert body_service.same_body(image, body_service.make_cube(2, 2.0))
    assert integration_service.volume_exact(image).value == pytest.approx(16.0)


def test_linear_image_shear_maps_vertices():
    image = body_service.linear_image(square_vertices(), [[1.0, 1.0], [0.0, 1.0]])
    assert vertex_set(image) == [(-2.0, -1.0), (0.0, -1.0), (0.0, 1.0), (2.0, 1.0)]


def test_linear_image_rejects_singular_matrix(cube2):
    with pytest.raises(SingularTransformError):
        body_service.linear_image(cube2, [[1.0, 1.0], [1.0, 1.0]])


def test_is_unconditional(cube2, diamond2, sheared_square):
    assert body_service.is_unconditional(cube2)
    assert body_service.is_unconditional(diamond2)
    assert not body_service.is_unconditional(sheared_square)
    assert body_service.is_unconditional(body_service.make_ball(3))


def test_random_polytope_is_deterministic():
    first = body_service.random_symmetric_polytope(2, 2, 5)
    second = body_service.random_symmetric_polytope(2, 2, 5)
    assert first.n_vertices == 4
    assert first.symmetric
    np.testing.assert_array_equal(first.vertices, second.vertices)


def test_random_polytope_is_full_dimensional():
    V = body_service.random_symmetric_polytope(3, 10, 7)
    assert np.linalg.matrix_rank(V.vertices) == 3
    assert body_service.contains(V, np.zeros((1, 3)))[0]


def test_enclosing_boxes(cube2, diamond2):
    np.testing.assert_allclose(body_service.enclosing_box(cube2), [[-1, 1], [-1, 1]], atol=1e-12)
    np.testing.assert_allclose(body_service.enclosing_box(diamond2), [[-1, 1], [-1, 1]], atol=1e-12)
    np.testing.assert_allclose(body_service.enclosing_box(body_service.make_ball(3, 2.0)), [[-2, 2]] * 3)


def test_fibers_of_polytopes_and_ball(diamond2):
    assert body_service.fiber(diamond2, 0, [0.0, 0.5]) == pytest.approx((-0.5, 0.5))
    assert body_service.fiber(body_service.make_ball(2), 0, [0.0, 0.6]) == pytest.approx((-0.8, 0.8))
    assert body_service.fiber(diamond2, 0, [0.0, 1.5]) is None


def test_composite_fiber_intersects_part_fibers(cube2):
    composite = body_service.intersect_oracle([cube2, body_service.make_ball(2)])
    assert composite.kind == "oracle-composite"
    assert composite.unconditional
    assert body_service.fiber(composite, 0, [0.0, 0.6]) == pytest.approx((-0.8, 0.8))
    half = float(np.sqrt(0.96))
    assert body_service.fiber(composite, 0, [0.0, 0.2]) == pytest.approx((-half, half))


def test_scale_and_contains(cube2):
    doubled = body_service.scale(cube2, 2.0)
    inside = body_service.contains(doubled, [[1.9, -1.9], [2.1, 0.0]])
    assert inside.tolist() == [True, False]


def test_rejects_unbounded_and_invalid_inputs():
    with pytest.raises(UnboundedBodyError):
        body_service.make_hpolytope([[1.0, 0.0], [-1.0, 0.0]], symmetric=True)
    with pytest.raises(GeometryError):
        body_service.make_regular_polygon(5)
    with pytest.raises(GeometryError):
        body_service.make_hpolytope([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], symmetric=True)


@pytest.mark.parametrize("n, pairs, seed", [(2, 5, 0), (2, 9, 1), (3, 6, 2), (3, 8, 3), (4, 7, 4)])
def test_bipolar_of_random_polytopes(n, pairs, seed):
    V = body_service.random_symmetric_polytope(n, pairs, seed)
    twice = body_service.polar_h_to_v(body_service.polar_v_to_h(V))
    np.testing.assert_allclose(twice.vertices, V.vertices, atol=1e-12)
    H = body_service.as_integrable(V)
    assert body_service.same_body(body_service.polar_h(body_service.polar_h(H)), H)


@pytest.mark.parametrize("n, seed", [(2, 5), (3, 6)])
def test_gauges_bound_inner_products(n, seed):
    K = body_service.as_integrable(body_service.random_symmetric_polytope(n, n + 3, seed))
    polar = body_service.polar_h(K)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((200, n))
    Y = rng.standard_normal((200, n))
    bound = body_service.gauge_many(K, X) * body_service.gauge_many(polar, Y)
    assert np.all(np.einsum("ij,ij->i", X, Y) <= bound + 1e-9)


def test_vertex_prefilter_drops_rows_touching_a_single_vertex(cube2):
    A = np.vstack([cube2.normals, [[0.5, 0.5]]])
    c = np.ones(A.shape[0])
    assert facet_candidates(A, c, np.zeros(2)).tolist() == [True, True, True, True, False]
    assert essential_rows(A, c, interior=np.zeros(2)).tolist() == [0, 1, 2, 3]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_vertex_prefilter_keeps_the_lp_result(seed):
    H = body_service.as_integrable(body_service.random_symmetric_polytope(3, 6, seed))
    rows, _, _, _ = symmetrization_service.steiner_rows(H, 2)
    c = np.ones(rows.shape[0])
    with_prefilter = essential_rows(rows, c, interior=np.zeros(3))
    np.testing.assert_array_equal(with_prefilter, essential_rows(rows, c))


def test_vertex_prefilter_limits_lp_calls(monkeypatch):
    H = body_service.as_integrable(body_service.random_symmetric_polytope(3, 6, 0))
    rows, _, _, _ = symmetrization_service.steiner_rows(H, 2)
    c = np.ones(rows.shape[0])
    candidates = int(facet_candidates(rows, c, np.zeros(3)).sum())
    calls = []
    original = lp_utils.maximize_linear

    def counting(*args):
        calls.append(1)
        return original(*args)

    monkeypatch.setattr(lp_utils, "maximize_linear", counting)
    essential_rows(rows, c, interior=np.zeros(3))
    assert len(calls) <= candidates < rows.shape[0]
