import numpy as np
import pytest

from mixedtraces.errors import DegenerateFamilyMember, NonpositiveP, SolverDiverged
from mixedtraces.experiments import generate_family
from mixedtraces.extension import discretize
from mixedtraces.interpolation import (
    KSolver,
    QuadraticSolver,
    Subadditivity,
    competitor_space,
    equivalence_report,
    fista,
    interpolation_norm,
    k_functional,
    k_profile,
    lambda_search,
    subadditivity,
)

H = 1 / 8
J = 4


@pytest.fixture(scope="module")
def disc(unit_square):
    return discretize(unit_square, H)


@pytest.fixture(scope="module")
def away_from_d(disc):
    return disc.sample(lambda x, y: np.maximum(y - 0.25, 0.0) * np.sin(np.pi * x), name="away")


def test_competitors_vanish_on_the_d_band(disc):
    space = competitor_space(disc)
    band = disc.dist_d[space.cells] < H
    assert np.array_equal(space.free, ~band)
    g = space.embed(np.ones(space.n_free))
    assert space.admissible(g)
    assert not space.admissible(np.ones(len(space.cells)))


def test_gradient_of_constant_vanishes(disc):
    space = competitor_space(disc)
    assert space.grad_lp(np.ones(len(space.cells)), 2) == pytest.approx(0.0)


def test_dense_and_sparse_solves_agree(disc):
    space = competitor_space(disc)
    rhs = np.linspace(0.0, 1.0, space.n_free)
    dense = QuadraticSolver(space)
    sparse = QuadraticSolver(space, dense_limit=0)
    assert dense.dense and not sparse.dense
    assert np.allclose(dense.solve(rhs, 0.7), sparse.solve(rhs, 0.7), atol=1e-10)


def test_lambda_search_finds_minimum():
    found = lambda_search(lambda x: float((x[0] - 3.0) ** 2), lambda lam: np.array([lam]))
    assert found.parameter == pytest.approx(3.0, rel=1e-3)
    assert found.value == pytest.approx(0.0, abs=1e-5)


def test_fista_converges_on_quadratic():
    target = np.array([1.0, -2.0, 0.5])
    result = fista(
        lambda x: float(((x - target) ** 2).sum() + 1.0),
        lambda x: 2 * (x - target),
        np.zeros(3),
        tol=1e-12,
        max_iter=500,
    )
    assert np.allclose(result.x, target, atol=1e-4)


def test_fista_reports_divergence():
    with pytest.raises(SolverDiverged):
        fista(
            lambda x: float(((x - 5.0) ** 2).sum() + 1.0),
            lambda x: 2 * (x - 5.0),
            np.zeros(2),
            tol=0.0,
            max_iter=2,
            lipschitz=100.0,
        )


def test_k_functional_needs_p_above_one(away_from_d):
    with pytest.raises(NonpositiveP):
        KSolver(away_from_d, 1.0)


def test_k_functional_bounds(disc, away_from_d):
    solver = KSolver(away_from_d, 2)
    value = k_functional(away_from_d, 1.0, 2, solver=solver)
    assert 0 < value <= solver.norm_p + 1e-12
    assert k_functional(disc.zeros(), 1.0, 2) == 0.0
    with pytest.raises(ValueError):
        solver.candidates(0.0)


def test_profile_is_monotone_and_concave(away_from_d):
    profile = k_profile(away_from_d, 2, J=J, max_workers=1)
    assert len(profile.t_grid) == 2 * J + 1
    assert profile.admissible
    assert profile.is_monotone()
    assert profile.is_concave()
    assert profile.within_envelope()
    assert np.all(profile.solver_values >= profile.k_values - 1e-12)
    assert profile.solver_agrees()
    frame = profile.to_frame()
    assert len(frame) == 2 * J + 1
    assert np.array_equal(frame["K_solve"].to_numpy(), profile.solver_values)


def test_profile_flags_a_solve_above_the_pool(away_from_d):
    solver = KSolver(away_from_d, 2)
    exact = solver.solve

    def short_of_optimum(t):
        value, residual, cands = exact(t)
        return (1.01 * value if t == 1.0 else value), residual, cands

    solver.solve = short_of_optimum
    profile = k_profile(away_from_d, 2, J=J, solver=solver, max_workers=1)
    assert profile.is_monotone()
    assert profile.is_concave()
    assert not profile.solver_agrees()
    assert int(np.argmax(profile.solver_gap())) == J
    assert profile.solver_gap()[J] >= 0.01 - 1e-12


def test_k_is_subadditive_on_seeded_pairs(disc):
    family = generate_family("bumps-away-from-D", 4, 11, disc, clearance=0.25)
    rng = np.random.default_rng(11)
    space = competitor_space(disc)
    quadratic = QuadraticSolver(space)
    for _ in range(3):
        i, j = rng.choice(len(family), size=2, replace=False)
        check = subadditivity(family[i], family[j], 2, J=J, space=space, quadratic=quadratic)
        assert check.passed, check.excess
        assert len(check.to_frame()) == 2 * J + 1


def test_k_of_a_doubled_function_is_twice_k(away_from_d):
    check = subadditivity(away_from_d, away_from_d, 2, J=J)
    assert check.passed
    assert np.allclose(check.k_sum, check.k_parts, rtol=1e-6)


def test_subadditivity_excess_is_detected():
    t = 2.0 ** np.arange(-2, 3)
    parts = np.full(5, 0.5)
    check = Subadditivity(names=("f", "g"), t_grid=t, k_sum=parts + np.array([0, 0, 0.1, 0, 0]), k_parts=parts, tol=1e-6)
    assert not check.passed
    assert check.excess == pytest.approx(0.1)
    assert check.to_frame()["passed"].tolist() == [True, True, False, True, True]


def test_profile_does_not_depend_on_threads(away_from_d):
    serial = k_profile(away_from_d, 2, J=J, max_workers=1)
    threaded = k_profile(away_from_d, 2, J=J, max_workers=4)
    assert np.array_equal(serial.k_values, threaded.k_values)


def test_interpolation_norm_of_admissible_function(away_from_d):
    report = interpolation_norm(away_from_d, 0.3, 2, J=J)
    assert report.value > report.parts["lp"] > 0
    assert np.isfinite(report.parts["tail_low"])
    assert "non-admissible" not in report.flags


def test_interpolation_norm_flags_non_admissible(disc):
    ones = disc.sample(lambda x, y: np.ones_like(x), name="ones")
    report = interpolation_norm(ones, 0.3, 2, J=J)
    assert "non-admissible" in report.flags
    assert report.parts["tail_low"] == np.inf


def test_interpolation_norm_range(away_from_d):
    with pytest.raises(ValueError):
        interpolation_norm(away_from_d, 1.0, 2, J=J)


def test_equivalence_report(disc, away_from_d):
    other = disc.sample(lambda x, y: np.maximum(y - 0.5, 0.0), name="ramp")
    profiles = []
    report = equivalence_report([away_from_d, other], 0.3, 2, J=J, budget=400, profiles=profiles)
    assert len(profiles) == 2
    assert np.all(report.ratios > 0)
    assert report.spread >= 1.0
    assert report.passed
    again = equivalence_report([away_from_d, other], 0.7, 2, J=J, profiles=profiles)
    assert again.names == ["away", "ramp"]
    with pytest.raises(ValueError):
        equivalence_report([away_from_d, other], 0.3, 3, J=J, profiles=profiles)


def test_equivalence_rejects_degenerate_member(disc):
    with pytest.raises(DegenerateFamilyMember):
        equivalence_report([disc.zeros("zero")], 0.3, 2, J=J)
    with pytest.raises(ValueError):
        equivalence_report([], 0.3, 2, J=J)
