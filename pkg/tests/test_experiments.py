import json
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from mixedtraces.errors import ConfigError
from mixedtraces.experiments import (
    PIPELINES,
    ExperimentRunner,
    PipelineParams,
    PipelineResult,
    Status,
    generate_family,
    resolve_fixture,
    write_bundle,
)
from mixedtraces.experiments import pipelines
from mixedtraces.experiments.bundle import combine, status_of
from mixedtraces.extension import discretize

TINY = dict(s_list=[0.3], p_list=[2.0], h_list=[1 / 8], depth=6, family_size=2, k_depth=3, cigar_pairs=3)


@pytest.fixture(scope="module")
def disc(unit_square):
    return discretize(unit_square, 1 / 16)


def test_family_is_seeded(disc):
    first = generate_family("bumps", 3, 7, disc)
    second = generate_family("bumps", 3, 7, disc)
    other = generate_family("bumps", 3, 8, disc)
    assert [f.name for f in first] == ["bump-000", "bump-001", "bump-002"]
    assert all(np.array_equal(a.values, b.values) for a, b in zip(first, second))
    assert not np.array_equal(first[0].values, other[0].values)


def test_family_members_are_independent(disc):
    family = generate_family("bumps", 10, 3, disc)
    values = np.stack([f.flat for f in family])
    assert np.linalg.matrix_rank(values @ values.T) == 10


def test_family_stays_inside_domain(disc):
    for f in generate_family("bumps", 4, 0, disc):
        assert np.all(f.flat[~disc.interior] == 0.0)
        assert np.any(f.flat != 0.0)


def test_bumps_keep_clear_of_d(disc):
    clearance = 0.25
    for f in generate_family("bumps-away-from-D", 4, 0, disc, clearance=clearance):
        support = f.support()
        assert len(support) > 0
        assert disc.dist_d[support].min() >= clearance


def test_polynomials_vanish_near_d(disc):
    clearance = 4 * disc.h
    near = disc.interior & (disc.dist_d <= clearance)
    for f in generate_family("polynomial-times-cutoff", 3, 1, disc):
        assert np.all(f.flat[near] == 0.0)


def test_family_arguments_are_checked(disc):
    with pytest.raises(ValueError):
        generate_family("waves", 2, 0, disc)
    with pytest.raises(ValueError):
        generate_family("bumps", 0, 0, disc)
    with pytest.raises(ValueError):
        generate_family("bumps-away-from-D", 2, 0, disc, clearance=disc.h)


def test_status_rules():
    assert status_of(True) is Status.PASS
    assert status_of(True, conclusive=False) is Status.INCONCLUSIVE
    assert status_of(False, conclusive=False) is Status.FAIL
    assert combine(Status.PASS, Status.INCONCLUSIVE) is Status.INCONCLUSIVE
    assert combine(Status.INCONCLUSIVE, Status.FAIL) is Status.FAIL
    assert combine() is Status.PASS


def test_pipeline_result_collects_tables():
    result = PipelineResult()
    result.add_table("t", pd.DataFrame({"a": [1]}))
    result.add_table("t", pd.DataFrame({"a": [2]}))
    assert result.tables["t"]["a"].tolist() == [1, 2]
    with pytest.raises(ValueError):
        result.set_status("no_such_item", Status.PASS)


def test_bundle_layout(tmp_path):
    result = PipelineResult()
    result.add_table("b", pd.DataFrame({"x": [1.5]}))
    result.add_table("a", pd.DataFrame({"y": [2.5]}))
    result.set_status("whitney_axioms", Status.PASS)
    result.set_status("cigar", Status.FAIL)
    bundle = write_bundle(result, tmp_path, {"experiment": "test"}, {"elapsed_s": 0.1})
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv", "b.csv", "manifest.json", "summary.json"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["items"] == {"whitney_axioms": "PASS", "cigar": "FAIL"}
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert set(manifest["tables"]) == {"a.csv", "b.csv"}
    assert manifest["manifest_hash"] == bundle.manifest["manifest_hash"]
    assert bundle.failed and bundle.exit_code == 1


def test_params_resolve_coarse_to_fine():
    params = PipelineParams(h_list=[1 / 32, 1 / 8, 1 / 16]).resolved()
    assert params.h_list == [1 / 8, 1 / 16, 1 / 32]
    assert params.clearance == pytest.approx(0.5)
    assert params.depth is not None and params.seed is not None


def test_whitney_audit_pipeline(unit_square):
    result = PIPELINES["whitney-audit"](unit_square, PipelineParams(**TINY).resolved())
    assert result.summary["whitney_axioms"] is Status.PASS
    assert {"whitney_audit", "whitney_classes", "distance_replays", "touching_chains"} <= set(result.tables)
    replays = result.tables["distance_replays"].set_index("replay")
    assert {"exterior_layer", "touching_chains"} <= set(replays.index)
    assert (replays.drop(index="touching_chains")["status"] == "PASS").all()
    expected = Status.PASS if (replays["status"] == "PASS").all() else Status.FAIL
    assert result.summary["distance_replays"] is expected
    chains = result.tables["touching_chains"].set_index("case")
    assert chains.loc["touching", "checked"] > 0
    assert chains.loc["touching", "incomparable"] == 0


def _violating(real):
    def verify(rmap, *args, **kwargs):
        diag = real(rmap, *args, **kwargs)
        return replace(diag, exterior_layer_checked=max(diag.exterior_layer_checked, 1), exterior_layer_violations=99)

    return verify


def test_exterior_layer_violations_fail_the_audit(unit_square, monkeypatch):
    monkeypatch.setattr(pipelines, "verify_reflection", _violating(pipelines.verify_reflection))
    result = PIPELINES["whitney-audit"](unit_square, PipelineParams(**TINY).resolved())
    replays = result.tables["distance_replays"].set_index("replay")
    assert replays.loc["exterior_layer", "violations"] == 99
    assert replays.loc["exterior_layer", "status"] == "FAIL"
    assert result.summary["distance_replays"] is Status.FAIL


def test_exterior_layer_violations_fail_the_extension_sweep(unit_square, monkeypatch):
    monkeypatch.setattr(pipelines, "verify_reflection", _violating(pipelines.verify_reflection))
    result = PIPELINES["extension-bound"](unit_square, PipelineParams(**TINY).resolved())
    assert result.tables["reflection"]["exterior_layer_violations"].tolist() == [99]
    assert result.summary["distance_replays"] is Status.FAIL


def test_extension_sweep_reports_the_exterior_layer(unit_square):
    result = PIPELINES["extension-bound"](unit_square, PipelineParams(**TINY).resolved())
    assert result.tables["reflection"]["exterior_layer_violations"].tolist() == [0]
    assert result.summary["distance_replays"] in (Status.PASS, Status.INCONCLUSIVE)


def test_hardy_sweep_without_d(half_plane):
    result = PIPELINES["hardy-sweep"](half_plane, PipelineParams(**TINY).resolved())
    assert result.summary["hardy_dichotomy"] is Status.INCONCLUSIVE
    assert result.tables == {}


def test_interpolation_needs_fractional_s(unit_square):
    params = PipelineParams(**{**TINY, "s_list": [1.0]}).resolved()
    result = PIPELINES["interpolation-equivalence"](unit_square, params)
    assert result.summary["interpolation_identity"] is Status.INCONCLUSIVE


def test_cigar_pipeline(unit_square):
    result = PIPELINES["cigar-check"](unit_square, PipelineParams(**TINY).resolved())
    assert result.summary["cigar"] in (Status.PASS, Status.INCONCLUSIVE)
    assert len(result.tables["cigar"]) == 3
    assert set(result.tables["d_sets"]["set_id"]) == {"D", "gamma", "omega"}
    assert "thickness" in result.tables


def test_resolve_fixture_by_name_and_path(tmp_path):
    bundled = resolve_fixture("l_shape")
    assert bundled.name == "l_shape.json"
    assert resolve_fixture(bundled) == bundled
    with pytest.raises(ConfigError):
        resolve_fixture(tmp_path / "missing.json")


def test_runner_rejects_bad_input(default_config):
    with pytest.raises(ConfigError):
        ExperimentRunner("no-such-experiment", "unit_square_bottom_d", config=default_config)
    with pytest.raises(ConfigError):
        ExperimentRunner("whitney-audit", "no_such_fixture", config=default_config)
    with pytest.raises(ConfigError):
        ExperimentRunner("whitney-audit", "unit_square_bottom_d", PipelineParams(s_list=[1.5]), config=default_config)


def test_runner_writes_bundle(default_config, tmp_path):
    runner = ExperimentRunner("whitney-audit", "unit_square_bottom_d", PipelineParams(**TINY), config=default_config)
    assert runner.default_out_dir().parts[-2:] == ("whitney-audit", "unit_square_bottom_d")
    bundle = runner.run(out_dir=tmp_path / "bundle", check_determinism=True)
    assert bundle.summary["determinism"] == "PASS"
    assert bundle.exit_code == 0
    assert (tmp_path / "bundle" / "whitney_audit.csv").is_file()
    assert bundle.manifest["config"]["experiment"] == "whitney-audit"
