import json

from typer.testing import CliRunner

from cli.main import app

runner = CliRunner()


def test_unknown_fixture_is_a_config_error(tmp_path):
    result = runner.invoke(app, ["audit-whitney", "--fixture", "no_such_fixture", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_out_of_range_s_is_rejected(tmp_path):
    result = runner.invoke(
        app, ["hardy-sweep", "--fixture", "unit_square_bottom_d", "--s", "1.5", "--out", str(tmp_path)]
    )
    assert result.exit_code == 2


def test_run_rejects_unreadable_config(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert runner.invoke(app, ["run", "--config", str(path)]).exit_code == 2
    assert runner.invoke(app, ["run", "--config", str(tmp_path / "missing.json")]).exit_code == 2


def test_run_rejects_unknown_experiment(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"experiment": "fourier-sweep", "fixture": "l_shape"}))
    assert runner.invoke(app, ["run", "--config", str(path)]).exit_code == 2


def test_audit_whitney_writes_bundle(tmp_path):
    out = tmp_path / "bundle"
    result = runner.invoke(
        app,
        ["audit-whitney", "--fixture", "unit_square_bottom_d", "--h", "0.125", "--depth", "6", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    summary = json.loads((out / "summary.json").read_text())
    assert summary["items"]["whitney_axioms"] == "PASS"
    assert (out / "manifest.json").is_file()


def test_run_config_document(tmp_path):
    out = tmp_path / "bundle"
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps(
            {
                "experiment": "cigar-check",
                "fixture": "unit_square_bottom_d",
                "params": {"depth": 6, "cigar_pairs": 2},
                "out_dir": str(out),
                "max_workers": 1,
            }
        )
    )
    result = runner.invoke(app, ["run", "--config", str(path)])
    assert result.exit_code == 0, result.output
    assert (out / "cigar.csv").is_file()
