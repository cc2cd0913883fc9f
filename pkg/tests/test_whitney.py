import numpy as np
import pytest
from shapely.geometry import LineString, Point

from mixedtraces.errors import EmptyClosedSet, InvalidParameters, WindowTooSmall
from mixedtraces.geometry.domain import Box
from mixedtraces.whitney import (
    audit_decomposition,
    classify_cubes,
    decompose_domain,
    long_distance,
    replay_boundary_layer,
    replay_exterior_point,
    replay_exterior_separation,
    whitney_decompose,
)

WINDOW = Box(-1.0, -1.0, 1.0, 1.0)


@pytest.fixture(scope="module")
def segment_dec():
    return whitney_decompose(LineString([(-0.25, 0.0), (0.25, 0.0)]), WINDOW, max_level=6, closed_set_id="segment")


@pytest.fixture(scope="module")
def square_classes(unit_square):
    return decompose_domain(unit_square, max_level=6)


def test_cubes_satisfy_whitney_axioms(segment_dec):
    audit = audit_decomposition(segment_dec)
    assert all(count == 0 for count in audit.violations.values())
    assert audit.coverage >= 0.99
    assert audit.passed
    assert set(audit.to_frame()["axiom"]) >= {"sandwich", "coverage"}


def test_cubes_are_in_canonical_order(segment_dec):
    assert np.all(np.diff(segment_dec.keys) > 0)
    again = whitney_decompose(segment_dec.closed_set, WINDOW, max_level=6)
    assert np.array_equal(again.keys, segment_dec.keys)


def test_cubes_keep_away_from_set(segment_dec):
    assert np.all(segment_dec.diam <= segment_dec.set_distance * (1 + 1e-12))


def test_truncation_is_reported(segment_dec):
    assert segment_dec.truncated
    assert len(segment_dec.collar) > 0
    assert segment_dec.collar_area > 0


def test_point_set_decomposition():
    dec = whitney_decompose(Point(0.1, 0.2), WINDOW, max_level=5)
    assert len(dec) > 0
    assert audit_decomposition(dec).passed


def test_empty_set_is_rejected():
    with pytest.raises(EmptyClosedSet):
        whitney_decompose(LineString(), WINDOW, max_level=4)


def test_set_reaching_window_is_rejected():
    with pytest.raises(WindowTooSmall):
        whitney_decompose(LineString([(-1.0, 0.0), (0.0, 0.0)]), WINDOW, max_level=4)


def test_long_distance(segment_dec):
    P = segment_dec.cube(0)
    assert long_distance(P, P) == pytest.approx(2 * P.diam)


def test_exterior_families_are_nested(square_classes):
    c = square_classes
    assert not np.any(c.w_e_prime & ~c.w_e)
    assert not np.any(c.w_e_dprime & ~c.w_e_prime)
    counts = c.counts()
    assert counts["w_e"] >= counts["w_e_prime"] >= counts["w_e_dprime"] > 0
    assert counts["w_i"] > 0


def test_exterior_cubes_sit_in_the_cone(square_classes):
    c = square_classes
    assert np.all(c.dist_gamma[c.w_e] < c.B * c.dist_d[c.w_e])
    assert np.all(c.dec_omega.side[c.w_e] <= c.A * c.delta)


def test_cone_parameters_are_checked(unit_square, square_classes):
    with pytest.raises(InvalidParameters):
        classify_cubes(square_classes.dec_gamma, square_classes.dec_omega, unit_square, B=2.0)
    with pytest.raises(InvalidParameters):
        classify_cubes(square_classes.dec_gamma, square_classes.dec_omega, unit_square, A=0.0)


def test_full_dirichlet_has_no_exterior_class(full_dirichlet):
    classes = decompose_domain(full_dirichlet, max_level=5)
    assert classes.dec_gamma is None
    assert not classes.w_e.any()
    assert classes.interior_frame().empty
    exterior = classes.exterior_frame()
    assert len(exterior) == len(classes.dec_omega.side)
    assert not exterior["w_e"].any()


def test_empty_dirichlet_keeps_small_cubes(half_plane):
    classes = decompose_domain(half_plane, max_level=4)
    small = classes.dec_omega.side <= classes.A * classes.delta
    assert np.array_equal(classes.w_e, small)


def test_distance_replays_hold(square_classes):
    layer = replay_boundary_layer(square_classes)
    assert layer.checked > 0 and layer.passed
    point = replay_exterior_point(square_classes, h=1 / 16)
    assert point.checked > 0 and point.passed
    separation = replay_exterior_separation(square_classes, h=1 / 16)
    assert separation.passed
    assert separation.constant > 0


def test_exterior_point_replay_without_d(half_plane):
    classes = decompose_domain(half_plane, max_level=4)
    assert replay_exterior_point(classes, h=0.5).checked == 0
