import pytest

from mixedtraces.dataflows.config import set_config
from mixedtraces.default_config import DEFAULT_CONFIG
from mixedtraces.experiments import resolve_fixture
from mixedtraces.geometry import load_domain


@pytest.fixture(autouse=True)
def default_config(tmp_path):
    config = DEFAULT_CONFIG.copy()
    config["results_dir"] = str(tmp_path / "results")
    set_config(config)
    yield config
    set_config(DEFAULT_CONFIG.copy())


def _load(name):
    return load_domain(resolve_fixture(name))


@pytest.fixture(scope="session")
def unit_square():
    return _load("unit_square_bottom_d")


@pytest.fixture(scope="session")
def full_dirichlet():
    return _load("square_full_dirichlet")


@pytest.fixture(scope="session")
def half_plane():
    return _load("half_plane")


@pytest.fixture(scope="session")
def l_shape():
    return _load("l_shape")


@pytest.fixture(scope="session")
def slit_square():
    return _load("slit_square")
