import numpy as np
import pytest

from mixedtraces.elliptic import (
    CoefficientField,
    assemble_dirichlet_form,
    check_ellipticity,
    coefficient_field,
    domain_characterization_report,
    fit_gaussian,
    fractional_power_apply,
    heat_apply,
    heat_kernel,
    max_regularity_ratio,
    mild_solution,
    spectral_decompose,
)
from mixedtraces.errors import (
    DegenerateFamilyMember,
    DimensionBudgetExceeded,
    EllipticityViolated,
    ResolutionTooCoarse,
    ZeroForcing,
)
from mixedtraces.experiments.pipelines import eigenmode_ratio_oracle, eigenvalue_oracle

H = 1 / 16


@pytest.fixture(scope="module")
def mixed_op(unit_square):
    return assemble_dirichlet_form(unit_square, "identity", H)


@pytest.fixture(scope="module")
def mixed_spec(mixed_op):
    return spectral_decompose(mixed_op)


@pytest.fixture(scope="module")
def small_spec(unit_square):
    return spectral_decompose(assemble_dirichlet_form(unit_square, "identity", 1 / 8))


def test_shipped_fields():
    pts = np.array([[0.1, 0.1], [0.3, 0.1]])
    checker = coefficient_field("checkerboard")(pts)
    assert checker[0, 0, 0] == 1.0 and checker[1, 0, 0] == 10.0
    assert coefficient_field("anisotropic")(pts)[0, 1, 1] == 4.0
    with pytest.raises(ValueError):
        coefficient_field("random")


def test_ellipticity_is_checked():
    skew = CoefficientField("skew", lambda pts: np.tile([[1.0, 1.0], [0.0, 1.0]], (len(pts), 1, 1)), 1.0)
    with pytest.raises(EllipticityViolated):
        check_ellipticity(skew, skew(np.zeros((1, 2))))
    weak = CoefficientField("weak", lambda pts: np.tile(0.5 * np.eye(2), (len(pts), 1, 1)), 1.0)
    with pytest.raises(EllipticityViolated):
        check_ellipticity(weak, weak(np.zeros((1, 2))))


def test_operator_is_symmetric_and_nonnegative(mixed_op):
    matrix = mixed_op.matrix
    assert abs(matrix - matrix.T).max() <= 1e-12
    u = np.linspace(-1.0, 1.0, mixed_op.dimension)
    assert mixed_op.form(u) >= 0
    assert mixed_op.dimension == 256


def test_face_coefficients_are_arithmetic_means(unit_square):
    op = assemble_dirichlet_form(unit_square, "checkerboard", 1 / 16)
    K = (op.matrix * op.h**2).tocoo()
    off = -K.data[K.row != K.col]
    # 1 | 10 faces give (1 + 10) / 2, the harmonic mean would be 20 / 11
    assert set(np.round(off, 9)) == {1.0, 5.5, 10.0}


def test_coarse_resolution_is_rejected(unit_square):
    with pytest.raises(ResolutionTooCoarse):
        assemble_dirichlet_form(unit_square, "identity", 0.5)


def test_spectrum_is_verified(mixed_op, mixed_spec):
    assert mixed_spec.verified
    assert np.all(np.diff(mixed_spec.eigenvalues) >= 0)
    assert mixed_spec.eigenvalues[0] > 0
    assert len(mixed_spec.to_frame(modes=8)) == 8
    dense = mixed_op.matrix.toarray()
    assert np.allclose(mixed_spec.reconstruct(), dense, atol=1e-9 * np.abs(dense).max())


def test_eigenvalues_match_closed_form(unit_square, full_dirichlet, mixed_spec):
    oracle = eigenvalue_oracle(unit_square, 3)
    assert np.allclose(mixed_spec.eigenvalues[:3], oracle, rtol=0.05)
    full = spectral_decompose(assemble_dirichlet_form(full_dirichlet, "identity", H))
    assert full.eigenvalues[0] == pytest.approx(2 * np.pi**2, rel=0.05)
    assert eigenvalue_oracle(full_dirichlet, 1)[0] == pytest.approx(2 * np.pi**2)


def test_dimension_budget(mixed_op):
    with pytest.raises(DimensionBudgetExceeded):
        spectral_decompose(mixed_op, limit=10)


def test_square_root_squares_to_operator(mixed_op, mixed_spec):
    x = np.random.default_rng(0).standard_normal(mixed_op.dimension)
    twice = fractional_power_apply(mixed_spec, 0.5, fractional_power_apply(mixed_spec, 0.5, x))
    expected = mixed_op.matrix @ x
    assert np.max(np.abs(twice - expected)) <= 1e-8 * np.max(np.abs(expected))
    with pytest.raises(ValueError):
        fractional_power_apply(mixed_spec, 0.7, x)


def test_heat_kernel_is_sub_markovian(small_spec):
    kernel, fit = heat_kernel(small_spec, 0.05)
    assert np.all(kernel.mass() <= 1 + 1e-9)
    assert np.allclose(kernel.values, kernel.values.T)
    assert kernel.negativity() <= 1e-8
    assert fit.b > 0
    with pytest.raises(ValueError):
        heat_kernel(small_spec, 0.0)


def test_heat_semigroup_damps_eigenmodes(small_spec):
    v = small_spec.eigenvectors[:, 2]
    lam = small_spec.eigenvalues[2]
    assert np.allclose(heat_apply(small_spec, 0.1, v), np.exp(-0.1 * lam) * v, atol=1e-10)
    once = heat_apply(small_spec, 0.2, v)
    twice = heat_apply(small_spec, 0.1, heat_apply(small_spec, 0.1, v))
    assert np.allclose(once, twice, atol=1e-10)


def test_gaussian_fit_over_times(small_spec):
    kernels = [heat_kernel(small_spec, t, fit=False)[0] for t in (0.01, 0.1)]
    fit = fit_gaussian(small_spec, kernels)
    assert fit.feasible
    assert fit.to_frame()["feasible"].iloc[0]


def test_mild_solution_of_an_eigenmode(small_spec):
    lam = small_spec.eigenvalues[0]
    v = small_spec.eigenvectors[:, 0]
    traj = mild_solution(small_spec, v, T=1.0, steps=16)
    expected = -np.expm1(-lam) / lam * v
    assert np.allclose(traj.states[-1], expected, atol=1e-10)
    assert len(traj.to_frame()) == 17


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_max_regularity_matches_eigenmode_oracle(small_spec, p):
    lam = small_spec.eigenvalues[1]
    v = small_spec.eigenvectors[:, 1]
    ratio = max_regularity_ratio(small_spec, v, p=p, T=1.0, steps=32)
    assert ratio == pytest.approx(eigenmode_ratio_oracle(lam, p, 1.0, 32), rel=1e-9)


def test_zero_forcing_is_rejected(small_spec):
    with pytest.raises(ZeroForcing):
        max_regularity_ratio(small_spec, np.zeros(small_spec.dimension), T=1.0, steps=4)


def test_domain_characterization(mixed_op, mixed_spec):
    disc = mixed_op.disc
    family = [
        disc.sample(lambda x, y: np.maximum(y - 0.25, 0.0) * np.sin(np.pi * x), name="a"),
        disc.sample(lambda x, y: np.maximum(y - 0.5, 0.0), name="b"),
    ]
    report = domain_characterization_report(mixed_spec, family, 0.5, budget=400)
    assert np.all(report.ratios > 0)
    assert report.passed
    with pytest.raises(DegenerateFamilyMember):
        domain_characterization_report(mixed_spec, [disc.zeros("zero")], 0.5)
