import json
import math

import numpy as np
import pytest
from shapely.geometry import LineString

from mixedtraces.errors import (
    EmptyGamma,
    EmptySet,
    InvalidGeometry,
    MalformedSpec,
    PairOutsideDomain,
)
from mixedtraces.geometry import check_d_set, dist_to, interior_thickness, load_domain
from mixedtraces.geometry.cigar import check_cigar
from mixedtraces.geometry.domain import Box
from mixedtraces.geometry.quasihyperbolic import domain_metric, quasihyperbolic_distance

SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def _spec(**overrides):
    spec = {
        "name": "square",
        "rings": [SQUARE],
        "d_arcs": [[[0.0, 0.0], [1.0, 0.0]]],
        "gamma_arcs": [[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]],
        "window": [-1.0, -1.0, 2.0, 2.0],
    }
    spec.update(overrides)
    return spec


def test_load_fixture_properties(unit_square):
    assert unit_square.area == pytest.approx(1.0)
    assert unit_square.diameter == pytest.approx(math.sqrt(2.0))
    assert unit_square.has_d and unit_square.has_gamma
    assert unit_square.delta == pytest.approx(unit_square.diameter)


def test_load_accepts_text_and_mapping():
    from_text = load_domain(json.dumps(_spec()))
    from_dict = load_domain(_spec())
    assert from_text.area == pytest.approx(from_dict.area)


def test_malformed_json_is_rejected():
    with pytest.raises(MalformedSpec):
        load_domain("{not json")


def test_missing_rings_is_rejected():
    spec = _spec()
    del spec["rings"]
    with pytest.raises(MalformedSpec):
        load_domain(spec)


def test_self_intersecting_ring_is_rejected():
    bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
    with pytest.raises(InvalidGeometry):
        load_domain(_spec(rings=[bowtie], d_arcs=[], gamma_arcs=[]))


def test_small_window_is_rejected():
    with pytest.raises(InvalidGeometry):
        load_domain(_spec(window=[-0.1, -0.1, 1.1, 1.1]))


def test_overlapping_arcs_are_rejected():
    with pytest.raises(InvalidGeometry):
        load_domain(_spec(gamma_arcs=[[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]]))


def test_error_diagnostic_names_operation():
    with pytest.raises(MalformedSpec) as info:
        load_domain("[")
    assert ":" in info.value.diagnostic()


def test_dist_to_targets(unit_square):
    x = (0.5, 0.25)
    assert dist_to(x, "D", unit_square) == pytest.approx(0.25)
    assert dist_to(x, "gamma", unit_square) == pytest.approx(0.5)
    assert dist_to(x, "boundary", unit_square) == pytest.approx(0.25)
    assert isinstance(dist_to(x, "D", unit_square), float)


def test_dist_to_array_and_outside(unit_square):
    pts = np.array([[0.5, 0.5], [0.5, -0.5]])
    dist = dist_to(pts, "complement", unit_square)
    assert dist.shape == (2,)
    assert dist[0] == pytest.approx(0.5)
    assert dist[1] == 0.0


def test_dist_to_empty_set_is_infinite(full_dirichlet, half_plane):
    assert math.isinf(dist_to((0.5, 0.5), "gamma", full_dirichlet))
    assert math.isinf(dist_to((0.0, 1.0), "D", half_plane))


def test_unknown_target(unit_square):
    with pytest.raises(ValueError):
        dist_to((0.5, 0.5), "exterior", unit_square)


def test_slit_points_are_outside(slit_square):
    inside = slit_square.contains(np.array([[0.5, 0.75], [0.25, 0.75], [0.5, 0.25]]))
    assert inside.tolist() == [False, True, True]
    assert slit_square.delta == pytest.approx(0.5)


def test_segment_is_one_set(unit_square):
    report = check_d_set(unit_square, "D", d=1, radii=[0.1, 0.25, 0.5])
    assert report.c_lower >= 1.0 - 1e-6
    assert report.c_upper <= 2.0 + 1e-6
    assert report.passed
    assert len(report.to_frame()) == len(report.samples)


def test_domain_is_two_set(l_shape):
    report = check_d_set(l_shape, "omega", d=2, radii=[0.05, 0.1])
    assert report.c_lower > 0.5
    assert report.c_upper <= math.pi + 1e-6


def test_d_set_of_empty_part(half_plane):
    with pytest.raises(EmptySet):
        check_d_set(half_plane, "D", d=1, radii=[0.5])


def test_d_set_radius_range(unit_square):
    with pytest.raises(ValueError):
        check_d_set(unit_square, "D", d=1, radii=[1.5])


def test_interior_thickness_on_flat_boundary(unit_square):
    report = interior_thickness(unit_square, radii=[0.1], points=np.array([[0.5, 1.0]]))
    assert report.min_ratio == pytest.approx(0.5, abs=1e-3)


def test_interior_thickness_sees_corners(unit_square):
    report = interior_thickness(unit_square, radii=[0.1, 0.2])
    assert 0.2 < report.min_ratio <= 0.5 + 1e-3


def test_interior_thickness_needs_gamma(full_dirichlet):
    with pytest.raises(EmptyGamma):
        interior_thickness(full_dirichlet, radii=[0.1])


def test_quasihyperbolic_distance_basic(unit_square):
    metric = domain_metric(unit_square, max_level=6)
    x, y = (0.3, 0.5), (0.7, 0.5)
    assert metric.distance(x, x) == pytest.approx(0.0)
    forward = metric.distance(x, y)
    assert forward > 0
    assert forward == pytest.approx(metric.distance(y, x))


def test_quasihyperbolic_distance_empty_set():
    empty = LineString()
    assert quasihyperbolic_distance((0, 0), (1, 1), empty) == 0.0


def test_quasihyperbolic_distance_needs_window():
    with pytest.raises(ValueError):
        quasihyperbolic_distance((0, 0), (1, 1), LineString([(5, 0), (5, 1)]))


def test_quasihyperbolic_distance_with_window():
    window = Box(-2.0, -2.0, 2.0, 2.0)
    segment = LineString([(0.0, -0.5), (0.0, 0.5)])
    value = quasihyperbolic_distance((-0.5, 0.0), (0.5, 0.0), segment, window=window, max_level=6)
    assert value > 0


def test_no_metric_without_gamma(full_dirichlet):
    assert domain_metric(full_dirichlet, max_level=4) is None


def test_cigar_on_convex_domain(unit_square):
    report = check_cigar(unit_square, [((0.3, 0.5), (0.7, 0.5))], eps_target=0.05, K_target=8.0, max_level=6)
    assert report.status == "PASS"
    assert report.min_epsilon >= 0.05
    assert list(report.to_frame().columns)[-1] == "status"


def test_cigar_rejects_outside_pair(unit_square):
    with pytest.raises(PairOutsideDomain):
        check_cigar(unit_square, [((0.5, 0.5), (1.5, 0.5))], eps_target=0.05, K_target=8.0, max_level=5)


def test_cigar_rejects_far_pair(slit_square):
    with pytest.raises(ValueError):
        check_cigar(slit_square, [((0.2, 0.2), (0.8, 0.2))], eps_target=0.05, K_target=8.0, max_level=5)
