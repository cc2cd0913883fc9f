import json
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from rich.align import Align

from mixedtraces.default_config import DEFAULT_CONFIG
from mixedtraces.errors import ConfigError, MixedTracesError
from mixedtraces.experiments import ExperimentRunner, ResultBundle
from cli.models import ExperimentConfig, ExperimentKind, SweepParams
from cli.utils import console, display_bundle, setup_logging, welcome_panel

EXIT_CONFIG_ERROR = 2
EXIT_INTERNAL_ERROR = 3

app = typer.Typer(
    name="mixedtraces",
    help="mixedtraces: numerical experiments on fractional spaces with mixed boundary conditions",
    add_completion=True,
)


def run_experiment(config: ExperimentConfig) -> ResultBundle:
    """Run the pipeline named by `config` and write its result bundle."""
    run_config = DEFAULT_CONFIG.copy()
    if config.max_workers is not None:
        run_config["max_workers"] = config.max_workers
    runner = ExperimentRunner(
        experiment=config.experiment.value,
        fixture=config.fixture,
        params=config.params.to_pipeline(),
        config=run_config,
    )
    return runner.run(out_dir=config.out_dir, check_determinism=config.check_determinism)


def _fail(message: str, code: int):
    console.print(f"[red]{message}[/red]")
    raise typer.Exit(code)


def _execute(build_config, verbose: bool):
    """Build the config, run it and map the outcome to an exit code."""
    setup_logging(verbose)
    try:
        config = build_config()
    except ValidationError as exc:
        _fail(f"cli.run_experiment: invalid configuration: {exc}", EXIT_CONFIG_ERROR)
    console.print(Align.center(welcome_panel(config.experiment.value, config.fixture)))
    try:
        bundle = run_experiment(config)
    except ConfigError as exc:
        _fail(exc.diagnostic(), EXIT_CONFIG_ERROR)
    except MixedTracesError as exc:
        _fail(exc.diagnostic(), EXIT_INTERNAL_ERROR)
    except Exception as exc:
        if verbose:
            console.print_exception()
        _fail(f"internal error: {type(exc).__name__}: {exc}", EXIT_INTERNAL_ERROR)
    display_bundle(bundle)
    raise typer.Exit(bundle.exit_code)


def _verb(
    kind: ExperimentKind,
    fixture: str,
    s: Optional[List[float]],
    p: Optional[List[float]],
    h: Optional[List[float]],
    depth: Optional[int],
    seed: Optional[int],
    family_size: Optional[int],
    out: Optional[Path],
    check_determinism: bool,
    verbose: bool,
):
    def build():
        params = {
            "s_list": s,
            "p_list": p,
            "h_list": h,
            "depth": depth,
            "seed": seed,
            "family_size": family_size,
        }
        return ExperimentConfig(
            experiment=kind,
            fixture=fixture,
            params=SweepParams(**{k: v for k, v in params.items() if v not in (None, [], ())}),
            out_dir=out,
            check_determinism=check_determinism,
        )

    _execute(build, verbose)


FixtureOption = typer.Option(..., "--fixture", "-f", help="Domain spec path or bundled fixture name")
SOption = typer.Option(None, "--s", help="Smoothness s (repeatable)")
POption = typer.Option(None, "--p", help="Exponent p (repeatable)")
HOption = typer.Option(None, "--h", help="Cell side h (repeatable; coarse to fine)")
DepthOption = typer.Option(None, "--depth", help="Whitney depth max_level")
SeedOption = typer.Option(None, "--seed", help="Seed of the test families")
FamilyOption = typer.Option(None, "--family-size", help="Number of test functions")
OutOption = typer.Option(None, "--out", "-o", help="Bundle directory")
DeterminismOption = typer.Option(False, "--check-determinism", help="Re-run and compare table hashes")
VerboseOption = typer.Option(False, "--verbose", "-v", help="Debug logging")


@app.command("audit-whitney")
def audit_whitney(
    fixture: str = FixtureOption,
    s: Optional[List[float]] = SOption,
    p: Optional[List[float]] = POption,
    h: Optional[List[float]] = HOption,
    depth: Optional[int] = DepthOption,
    seed: Optional[int] = SeedOption,
    family_size: Optional[int] = FamilyOption,
    out: Optional[Path] = OutOption,
    check_determinism: bool = DeterminismOption,
    verbose: bool = VerboseOption,
):
    """Whitney axioms of both decompositions and the distance replays."""
    _verb(ExperimentKind.WHITNEY_AUDIT, fixture, s, p, h, depth, seed, family_size, out, check_determinism, verbose)


@app.command("extend-bound")
def extend_bound(
    fixture: str = FixtureOption,
    s: Optional[List[float]] = SOption,
    p: Optional[List[float]] = POption,
    h: Optional[List[float]] = HOption,
    depth: Optional[int] = DepthOption,
    seed: Optional[int] = SeedOption,
    family_size: Optional[int] = FamilyOption,
    out: Optional[Path] = OutOption,
    check_determinism: bool = DeterminismOption,
    verbose: bool = VerboseOption,
):
    """Partition of unity, extension operator, boundedness sweep and cutoff decay."""
    _verb(ExperimentKind.EXTENSION_BOUND, fixture, s, p, h, depth, seed, family_size, out, check_determinism, verbose)


@app.command("hardy-sweep")
def hardy_sweep(
    fixture: str = FixtureOption,
    s: Optional[List[float]] = SOption,
    p: Optional[List[float]] = POption,
    h: Optional[List[float]] = HOption,
    depth: Optional[int] = DepthOption,
    seed: Optional[int] = SeedOption,
    family_size: Optional[int] = FamilyOption,
    out: Optional[Path] = OutOption,
    check_determinism: bool = DeterminismOption,
    verbose: bool = VerboseOption,
):
    """Hardy ratios off and at the critical exponent sp = 1."""
    _verb(ExperimentKind.HARDY_SWEEP, fixture, s, p, h, depth, seed, family_size, out, check_determinism, verbose)


@app.command("interp-equiv")
def interp_equiv(
    fixture: str = FixtureOption,
    s: Optional[List[float]] = SOption,
    p: Optional[List[float]] = POption,
    h: Optional[List[float]] = HOption,
    depth: Optional[int] = DepthOption,
    seed: Optional[int] = SeedOption,
    family_size: Optional[int] = FamilyOption,
    out: Optional[Path] = OutOption,
    check_determinism: bool = DeterminismOption,
    verbose: bool = VerboseOption,
):
    """K-profiles and the interpolation against weighted norm spread."""
    _verb(
        ExperimentKind.INTERPOLATION_EQUIVALENCE, fixture, s, p, h, depth, seed, family_size, out, check_determinism, verbose
    )


@app.command("elliptic-suite")
def elliptic_suite(
    fixture: str = FixtureOption,
    s: Optional[List[float]] = SOption,
    p: Optional[List[float]] = POption,
    h: Optional[List[float]] = HOption,
    depth: Optional[int] = DepthOption,
    seed: Optional[int] = SeedOption,
    family_size: Optional[int] = FamilyOption,
    out: Optional[Path] = OutOption,
    check_determinism: bool = DeterminismOption,
    verbose: bool = VerboseOption,
):
    """Spectrum, heat kernel, fractional powers and maximal regularity of L_D."""
    _verb(ExperimentKind.ELLIPTIC_SUITE, fixture, s, p, h, depth, seed, family_size, out, check_determinism, verbose)


@app.command("cigar-check")
def cigar_check(
    fixture: str = FixtureOption,
    s: Optional[List[float]] = SOption,
    p: Optional[List[float]] = POption,
    h: Optional[List[float]] = HOption,
    depth: Optional[int] = DepthOption,
    seed: Optional[int] = SeedOption,
    family_size: Optional[int] = FamilyOption,
    out: Optional[Path] = OutOption,
    check_determinism: bool = DeterminismOption,
    verbose: bool = VerboseOption,
):
    """Cigar curves for seeded point pairs, with d-set and thickness diagnostics."""
    _verb(ExperimentKind.CIGAR_CHECK, fixture, s, p, h, depth, seed, family_size, out, check_determinism, verbose)


@app.command("run")
def run(
    config_path: Path = typer.Option(..., "--config", "-c", help="ExperimentConfig JSON document"),
    verbose: bool = VerboseOption,
):
    """Run a full ExperimentConfig document."""

    def build():
        try:
            payload = json.loads(config_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            _fail(f"cli.run_experiment: cannot read {config_path}: {exc}", EXIT_CONFIG_ERROR)
        return ExperimentConfig.model_validate(payload)

    _execute(build, verbose)


if __name__ == "__main__":
    app()
