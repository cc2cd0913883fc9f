import numpy as np
import pytest

from mixedtraces.errors import EmptyD, InconsistentInputs
from mixedtraces.extension import (
    CellKind,
    build_partition,
    check_partition,
    cutoff_vm,
    discretize,
    extend,
    lipschitz_violations,
    support_separation,
    zero_extend_cube,
    zero_extend_omega_d,
)
from mixedtraces.extension.cutoff import cutoff_profile
from mixedtraces.reflection import build_reflection
from mixedtraces.whitney import decompose_domain

H = 1 / 16


@pytest.fixture(scope="module")
def disc(unit_square):
    return discretize(unit_square, H)


@pytest.fixture(scope="module")
def classes(unit_square):
    return decompose_domain(unit_square, max_level=6)


@pytest.fixture(scope="module")
def rmap(classes):
    return build_reflection(classes)


@pytest.fixture(scope="module")
def pu(classes, disc):
    return build_partition(classes, disc)


def test_discretization_cells(disc):
    assert disc.grid.xmin == pytest.approx(-0.25)
    assert disc.grid.nx == 24 and disc.grid.ny == 24
    assert len(disc.cells(CellKind.INTERIOR)) == 256
    assert disc.mask.shape == disc.grid.shape


def test_faces_have_an_interior_side(disc):
    faces = disc.faces
    assert np.all(disc.interior[faces.a])
    walls = ~faces.open
    assert walls.any()
    assert np.all(~disc.interior[faces.b[walls]])


def test_function_is_masked_to_the_domain(disc):
    f = disc.function(np.ones(disc.grid.size))
    assert f.flat.sum() == pytest.approx(256)
    assert np.all(f.flat[~disc.interior] == 0.0)


def test_grid_function_arithmetic(disc, unit_square):
    f = disc.sample(lambda x, y: x)
    g = disc.sample(lambda x, y: y)
    combo = 2 * f - g
    assert np.allclose(combo.flat, 2 * f.flat - g.flat)
    assert np.allclose((-f).flat, -f.flat)
    other = discretize(unit_square, H)
    with pytest.raises(ValueError):
        f + other.sample(lambda x, y: y)


def test_partition_sums_to_one(pu):
    check = check_partition(pu, probe=5)
    assert check.max_sum_error <= 1e-12
    assert check.support_violations == 0
    assert check.passed
    assert np.isfinite(pu.gradient_constant) and pu.gradient_constant > 0
    assert 0 < pu.plateau_coverage() <= 1


def test_extension_copies_interior(disc, rmap, pu):
    f = disc.sample(lambda x, y: np.sin(3 * x) + y)
    ext = extend(f, rmap, pu)
    assert np.array_equal(ext.flat[disc.interior], f.flat[disc.interior])
    assert np.any(ext.flat[~disc.interior] != 0.0)


def test_extension_is_linear(disc, rmap, pu):
    f = disc.sample(lambda x, y: x * y)
    g = disc.sample(lambda x, y: np.cos(x))
    lhs = extend(3.0 * f + g, rmap, pu)
    rhs = 3.0 * extend(f, rmap, pu) + extend(g, rmap, pu)
    assert np.max(np.abs(lhs.flat - rhs.flat)) <= 1e-12


def test_extension_keeps_away_from_d(disc, rmap, pu):
    f = disc.sample(lambda x, y: (y > 0.5).astype(float))
    ext = extend(f, rmap, pu)
    sep = support_separation(f, ext)
    assert sep.rho >= 0.5
    assert sep.separated
    assert sep.ratio < np.inf


def test_extension_rejects_foreign_grid(unit_square, rmap, pu):
    other = discretize(unit_square, H)
    with pytest.raises(InconsistentInputs):
        extend(other.sample(lambda x, y: x), rmap, pu)


def test_cube_mean_of_zero_extension(disc):
    ones = disc.function(np.ones(disc.grid.size))
    assert zero_extend_cube(ones, (0.0, 0.0, 0.5, 0.5)) == pytest.approx(1.0)
    assert zero_extend_cube(ones, (-0.5, 0.0, 0.5, 0.5)) == pytest.approx(0.5)


def test_cutoff_profile():
    values = cutoff_profile(np.array([0.0, 0.25, 0.375, 0.5, 1.0]), 4)
    assert values.tolist() == pytest.approx([1.0, 1.0, 0.5, 0.0, 0.0])


def test_cutoff_is_lipschitz(disc):
    v = cutoff_vm(4, disc)
    assert v.flat.max() == 1.0
    assert lipschitz_violations(v, 4) == 0


def test_cutoff_needs_d(half_plane):
    with pytest.raises(EmptyD):
        cutoff_vm(2, discretize(half_plane, 0.5))
    with pytest.raises(ValueError):
        cutoff_vm(0, discretize(half_plane, 0.5))


def test_omega_d_wing_carries_no_mass(disc):
    f = disc.sample(lambda x, y: x + 1.0)
    samples = zero_extend_omega_d(f, wing_radius=10.0, wing_cells=8)
    expected = (np.abs(f.flat[disc.interior]) ** 2).sum() * H * H
    assert samples.mass(2) == pytest.approx(expected)
    assert samples.d_length == pytest.approx(1.0)


def test_omega_d_needs_d(half_plane):
    f = discretize(half_plane, 0.5).sample(lambda x, y: x)
    with pytest.raises(EmptyD):
        zero_extend_omega_d(f)
