import json

import numpy as np
import pandas as pd
import pytest

from mixedtraces.dataflows.config import get_config, resolve, set_config
from mixedtraces.dataflows.gridfn import dumps_gridfn, read_gridfn, write_gridfn
from mixedtraces.dataflows.tables import concat_tables, manifest_hash, save_table, sha256_file, write_json
from mixedtraces.errors import ConfigError, MalformedSpec
from mixedtraces.extension import discretize


def test_resolve_prefers_explicit_values():
    assert resolve("max_level", 5) == 5
    assert resolve("max_level") == get_config()["max_level"]
    with pytest.raises(ConfigError):
        resolve("no_such_knob")


def test_set_config_updates_a_copy():
    set_config({"max_level": 3})
    config = get_config()
    assert config["max_level"] == 3
    config["max_level"] = 99
    assert get_config()["max_level"] == 3


def test_saved_tables_are_byte_stable(tmp_path):
    frame = pd.DataFrame({"a": [1.0 / 3.0, 2.0], "b": ["x", "y"]})
    first = save_table(frame, "t", tmp_path / "one")
    second = save_table(frame.copy(), "t", tmp_path / "two")
    assert sha256_file(first) == sha256_file(second)
    assert first.read_text().splitlines()[1] == "0.333333333333,x"


def test_concat_skips_empty_frames():
    frame = pd.DataFrame({"a": [1]})
    assert len(concat_tables([None, pd.DataFrame(), frame, frame])) == 2
    assert concat_tables([]).empty


def test_manifest_hash_ignores_insertion_order():
    assert manifest_hash({"a.csv": "1", "b.csv": "2"}) == manifest_hash({"b.csv": "2", "a.csv": "1"})


def test_write_json_handles_numpy_and_infinity(tmp_path):
    path = write_json({"n": np.int64(3), "inf": float("inf"), "path": tmp_path}, tmp_path / "x.json")
    payload = json.loads(path.read_text())
    assert payload["n"] == 3
    assert payload["inf"] == "inf"


def test_gridfn_text_layout(unit_square):
    disc = discretize(unit_square, 1 / 8)
    f = disc.sample(lambda x, y: x - y, name="diff")
    lines = dumps_gridfn(f).splitlines()
    assert lines[0] == "# mixedtraces gridfn v1"
    assert lines[1] == "name diff"
    assert lines[4 + disc.grid.ny] == "mask"
    assert len(lines) == 5 + 2 * disc.grid.ny


def test_gridfn_file_reloads(unit_square, tmp_path):
    disc = discretize(unit_square, 1 / 8)
    f = disc.sample(lambda x, y: np.sin(x) * y, name="wave")
    loaded = read_gridfn(write_gridfn(f, tmp_path / "wave.gridfn"), disc)
    assert loaded.name == "wave"
    assert np.array_equal(loaded.values, f.values)


def test_gridfn_rejects_other_grid(unit_square):
    f = discretize(unit_square, 1 / 8).sample(lambda x, y: x)
    with pytest.raises(MalformedSpec):
        read_gridfn(dumps_gridfn(f), discretize(unit_square, 1 / 16))


def test_gridfn_rejects_other_domain(unit_square, l_shape):
    f = discretize(unit_square, 1 / 8).sample(lambda x, y: x)
    with pytest.raises(MalformedSpec):
        read_gridfn(dumps_gridfn(f), discretize(l_shape, 1 / 8))


def test_gridfn_rejects_bad_header(unit_square):
    with pytest.raises(MalformedSpec):
        read_gridfn("hello\n", discretize(unit_square, 1 / 8))
