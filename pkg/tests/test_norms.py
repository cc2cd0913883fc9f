import numpy as np
import pytest

from mixedtraces.errors import NonpositiveP, WingTruncationTooSmall, ZeroDenominator
from mixedtraces.extension import build_partition, discretize, zero_extend_omega_d
from mixedtraces.norms import (
    NormParams,
    NormReport,
    extension_ratio,
    gagliardo_seminorm,
    hardy_ratio,
    lp_norm,
    offset_sums,
    omega_d_norm,
    pair_sum,
    region_cells,
    sobolev1_norm,
    support_box,
    weighted_integral,
    weighted_norm,
    with_bias,
)
from mixedtraces.reflection import build_reflection
from mixedtraces.whitney import decompose_domain

H = 1 / 16


@pytest.fixture(scope="module")
def disc(unit_square):
    return discretize(unit_square, H)


def test_params_are_validated():
    with pytest.raises(NonpositiveP):
        NormParams(s=0.5, p=0.5)
    with pytest.raises(ValueError):
        NormParams(s=0.0, p=2)
    with pytest.raises(ValueError):
        NormParams(s=0.5, p=2, region="plane")


def test_critical_band():
    assert NormParams(s=0.5, p=2).critical()
    assert not NormParams(s=0.3, p=2).critical()
    assert NormParams(s=0.5, p=2).on("window").region == "window"


def test_negative_report_is_rejected():
    with pytest.raises(ValueError):
        NormReport(op="lp", value=-1.0, h=H)


def test_bias_between_resolutions():
    coarse = NormReport(op="lp", value=1.0, h=1 / 8)
    fine = NormReport(op="lp", value=1.5, h=1 / 16)
    report = with_bias(coarse, fine, tolerance=0.3)
    assert report.estimated_bias == pytest.approx(1 / 3)
    assert "bias" in report.flags
    assert fine.flags == []
    with pytest.raises(ValueError):
        with_bias(NormReport(op="gagliardo", value=1.0, h=1 / 8), fine)


def test_lp_norm_of_constant(disc):
    ones = disc.sample(lambda x, y: np.ones_like(x))
    assert lp_norm(ones, 2).value == pytest.approx(1.0)
    assert lp_norm(ones, 1).value == pytest.approx(1.0)
    with pytest.raises(NonpositiveP):
        lp_norm(ones, 0.5)


def test_weighted_integral_without_d(half_plane):
    f = discretize(half_plane, 0.5).sample(lambda x, y: np.ones_like(x))
    assert weighted_integral(f, 0.5, 2) == 0.0
    assert "empty-D" in lp_norm(f, 2, weight="d_D", s=0.5).flags
    assert hardy_ratio(f, NormParams(s=0.3, p=2)) == 0.0


def test_weighted_integral_grows_with_sp(disc):
    ones = disc.sample(lambda x, y: np.ones_like(x))
    assert weighted_integral(ones, 0.2, 2) < weighted_integral(ones, 0.4, 2)


def test_seminorm_of_constant_vanishes(disc):
    ones = disc.sample(lambda x, y: np.ones_like(x))
    assert gagliardo_seminorm(ones, NormParams(s=0.5, p=2)).value == pytest.approx(0.0)


def test_seminorm_does_not_depend_on_threads(disc):
    f = disc.sample(lambda x, y: np.sin(2 * x) * y)
    params = NormParams(s=0.4, p=2)
    serial = gagliardo_seminorm(f, params, block_size=64, max_workers=1)
    threaded = gagliardo_seminorm(f, params, block_size=64, max_workers=4)
    assert serial.value > 0
    assert serial.value == threaded.value
    assert serial.band_exponent == pytest.approx(1.2)


def test_seminorm_needs_fractional_s(disc):
    f = disc.sample(lambda x, y: x)
    with pytest.raises(ValueError):
        gagliardo_seminorm(f, NormParams(s=1.0, p=2))


def test_sobolev_norm_of_linear_function(disc):
    f = disc.sample(lambda x, y: x)
    report = sobolev1_norm(f, 2)
    assert report.parts["grad"] == pytest.approx(1.0, rel=1e-9)
    assert report.parts["lp"] == pytest.approx(1 / np.sqrt(3), rel=1e-2)


def test_hardy_ratio_needs_nonzero_function(disc):
    zero = disc.zeros()
    with pytest.raises(ZeroDenominator):
        hardy_ratio(zero, NormParams(s=0.3, p=2))


def test_hardy_ratio_is_positive(disc):
    f = disc.sample(lambda x, y: np.ones_like(x))
    assert hardy_ratio(f, NormParams(s=0.3, p=2)) > 0


def test_weighted_norm_parts(disc):
    f = disc.sample(lambda x, y: x + y)
    report = weighted_norm(f, NormParams(s=0.3, p=2))
    assert set(report.parts) == {"lp", "seminorm", "weighted"}
    assert report.value == pytest.approx(sum(report.parts.values()))


def test_extension_ratio_is_finite(unit_square):
    disc = discretize(unit_square, 1 / 8)
    classes = decompose_domain(unit_square, max_level=5)
    rmap = build_reflection(classes)
    pu = build_partition(classes, disc)
    f = disc.sample(lambda x, y: np.cos(x) * y)
    result = extension_ratio(f, rmap, pu, NormParams(s=0.3, p=2))
    assert 0 < result.ratio < np.inf
    assert result.sobolev1_ratio > 0
    assert list(result.to_frame().columns)[0] == "ratio"


def test_omega_d_norm_exceeds_slice_norm(disc):
    f = disc.sample(lambda x, y: np.ones_like(x))
    samples = zero_extend_omega_d(f)
    report = omega_d_norm(samples, NormParams(s=0.3, p=2), kernel_sign=1)
    assert report.parts["cross"] > 0
    assert report.parts["tail"] <= 0.01 * report.parts["cross"]
    assert report.value > report.parts["lp"]


def test_omega_d_norm_rejects_divergent_wing(disc):
    f = disc.sample(lambda x, y: np.ones_like(x))
    samples = zero_extend_omega_d(f)
    with pytest.raises(WingTruncationTooSmall):
        omega_d_norm(samples, NormParams(s=0.5, p=2), kernel_sign=-1)


def _brute_seminorm(f, params):
    cells = region_cells(f, params.region)
    total = pair_sum(f.flat[cells], f.disc.centers[cells], params.p, 2 + params.sp, cutoff=f.h * (1 - 1e-9), max_workers=1)
    return (total * f.h**4) ** (1.0 / params.p)


def _bump(disc):
    return disc.sample(lambda x, y: np.maximum(0.0, 0.09 - (x - 0.4) ** 2 - (y - 0.6) ** 2), name="bump")


@pytest.mark.parametrize("region", ["window", "omega"])
@pytest.mark.parametrize("s, p", [(0.3, 2.0), (0.7, 3.0)])
def test_cropped_seminorm_matches_all_pairs(disc, region, s, p):
    f = _bump(disc)
    params = NormParams(s=s, p=p, region=region)
    assert gagliardo_seminorm(f, params, max_workers=1).value == pytest.approx(_brute_seminorm(f, params), rel=1e-9)


def test_seminorm_of_full_support_matches_all_pairs(disc):
    f = disc.sample(lambda x, y: np.sin(2 * x) * y + 0.5)
    params = NormParams(s=0.5, p=1.5)
    assert gagliardo_seminorm(f, params, max_workers=1).value == pytest.approx(_brute_seminorm(f, params), rel=1e-9)


def test_support_box_crops_the_window(disc):
    f = _bump(disc)
    rows, cols = support_box(f, np.ones(f.grid.shape, dtype=bool))
    cells = (rows.stop - rows.start) * (cols.stop - cols.start)
    assert 0 < cells < f.grid.size / 4
    outside = f.values.copy()
    outside[rows, cols] = 0.0
    assert not outside.any()
    assert support_box(disc.zeros(), np.ones(f.grid.shape, dtype=bool)) is None


def test_offset_sums_are_reused_across_s(disc):
    f = _bump(disc)
    mask = np.ones(f.grid.shape, dtype=bool)
    first = offset_sums(f.values, mask, 2.0, max_workers=1)
    again = offset_sums(f.values.copy(), mask, 2.0, max_workers=1)
    assert first is again
    assert not first.flags.writeable
    assert offset_sums(f.values, mask, 3.0, max_workers=1) is not first
