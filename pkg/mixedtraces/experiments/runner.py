# mixedtraces/experiments/runner.py

import logging
import tempfile
import time
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

from mixedtraces.dataflows.config import get_config, set_config
from mixedtraces.dataflows.tables import sha256_file
from mixedtraces.default_config import DEFAULT_CONFIG
from mixedtraces.errors import ConfigError
from mixedtraces.geometry import DomainModel, load_domain

from .bundle import PipelineResult, ResultBundle, Status, write_bundle, write_tables
from .pipelines import PIPELINES, PipelineParams

logger = logging.getLogger(__name__)


def resolve_fixture(fixture: Union[str, Path], fixtures_dir: Optional[str] = None) -> Path:
    """A path to a domain spec, or the name of a bundled fixture."""
    path = Path(fixture)
    if path.is_file():
        return path
    bundled = Path(fixtures_dir or get_config()["fixtures_dir"]) / f"{path.stem}.json"
    if bundled.is_file():
        return bundled
    raise ConfigError(f"fixture not found: {fixture}")


class ExperimentRunner:
    """Main class that runs one experiment pipeline and writes its result bundle."""

    def __init__(
        self,
        experiment: str,
        fixture: Union[str, Path, DomainModel],
        params: Optional[PipelineParams] = None,
        config: Dict[str, Any] = None,
    ):
        """Initialize the runner and load the fixture.

        Args:
            experiment: Pipeline name, one of PIPELINES
            fixture: Domain spec path, bundled fixture name or a loaded DomainModel
            params: Sweep parameters; unset fields come from the config
            config: Configuration dictionary. If None, uses default config
        """
        self.config = config or DEFAULT_CONFIG
        set_config(self.config)

        if experiment not in PIPELINES:
            raise ConfigError(f"Unsupported experiment: {experiment}")
        self.experiment = experiment
        self.pipeline = PIPELINES[experiment]

        if isinstance(fixture, DomainModel):
            self.fixture_path = None
            self.domain = fixture
        else:
            self.fixture_path = resolve_fixture(fixture, self.config.get("fixtures_dir"))
            self.domain = load_domain(self.fixture_path)
        self.params = (params or PipelineParams()).resolved()
        self._validate_params()

    def _validate_params(self):
        p = self.params
        if not p.s_list or any(not 0 < s <= 1 for s in p.s_list):
            raise ConfigError(f"s values must lie in (0, 1], got {p.s_list}")
        if not p.p_list or any(not q >= 1 for q in p.p_list):
            raise ConfigError(f"p values must be at least 1, got {p.p_list}")
        if not p.h_list or any(not h > 0 for h in p.h_list):
            raise ConfigError(f"h values must be positive, got {p.h_list}")
        if p.depth < 1 or p.family_size < 1:
            raise ConfigError("depth and family size must be positive")

    def default_out_dir(self) -> Path:
        return Path(get_config()["results_dir"]) / self.experiment / self.domain.name

    def config_echo(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "fixture": str(self.fixture_path) if self.fixture_path else self.domain.name,
            "params": asdict(self.params),
            "config": get_config(),
        }

    def execute(self) -> PipelineResult:
        logger.info("Running %s on %s", self.experiment, self.domain.name)
        return self.pipeline(self.domain, self.params)

    def run(self, out_dir: Optional[Union[str, Path]] = None, check_determinism: bool = False) -> ResultBundle:
        """Run the pipeline and write the bundle.

        Args:
            out_dir: Bundle directory; defaults to results_dir/<experiment>/<fixture>
            check_determinism: Re-run single-threaded and compare table hashes

        Returns:
            ResultBundle
        """
        out_dir = Path(out_dir) if out_dir else self.default_out_dir()
        started = datetime.now(timezone.utc).isoformat()
        t0 = time.perf_counter()
        result = self.execute()

        extra = {}
        if check_determinism:
            extra["determinism"] = self.check_determinism(result)
        wall_clock = {"started": started, "elapsed_s": time.perf_counter() - t0}
        return write_bundle(result, out_dir, self.config_echo(), wall_clock, extra)

    def check_determinism(self, result: PipelineResult) -> Status:
        """Re-run with one worker and compare the table bytes with `result`."""
        first = self._table_hashes(result)
        workers = get_config()["max_workers"]
        set_config({"max_workers": 1})
        try:
            second = self._table_hashes(self.execute())
        finally:
            set_config({"max_workers": workers})
        same = first == second
        if not same:
            differing = sorted(k for k in set(first) | set(second) if first.get(k) != second.get(k))
            logger.warning("Tables differ between runs: %s", ", ".join(differing))
        return Status.PASS if same else Status.FAIL

    @staticmethod
    def _table_hashes(result: PipelineResult) -> Dict[str, str]:
        with tempfile.TemporaryDirectory() as tmp:
            paths = write_tables(result, Path(tmp))
            return {tag: sha256_file(path) for tag, path in paths.items()}
