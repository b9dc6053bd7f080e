import json
import math

import numpy as np
import pydantic
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibertaper import io as fio
from fibertaper.config import RunConfig, apply_overrides, load_config
from fibertaper.errors import ValidationError
from fibertaper.waveguide import ModeId

finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(a=st.lists(finite, min_size=1, max_size=30))
def test_csv_round_trip(tmp_path_factory, a):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    x = np.asarray(a)
    y = np.where(np.arange(x.size) % 3 == 0, np.nan, -x)
    path.write_text(fio.format_csv(["x", "y"], [x, y], ["a comment"]))
    cols = fio.read_columns(path, ("x", "y"))
    assert np.array_equal(cols["x"], x)
    assert np.array_equal(np.isnan(cols["y"]), np.isnan(y))
    assert np.array_equal(cols["y"][~np.isnan(y)], y[~np.isnan(y)])


def test_wrong_columns(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValidationError):
        fio.read_columns(path, ("L_m", "T"))


def test_ragged_row(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("L_m,T\n0,1\n1\n")
    with pytest.raises(ValidationError):
        fio.read_columns(path)


def test_pgm_round_trip(tmp_path):
    m = np.outer(np.arange(4), np.arange(7)).astype(float)
    fio.write_pgm(tmp_path / "m.pgm", m)
    img = fio.read_pgm(tmp_path / "m.pgm")
    assert img.shape == m.shape and img.max() == 65535 and img.min() == 0
    assert np.array_equal(np.argsort(img.ravel(), kind="stable"), np.argsort(m.ravel(), kind="stable"))


def test_dumps_strict_json():
    text = fio.dumps({"a": math.nan, "b": np.float64(2.5), "c": [np.int64(3)], "m": ModeId.parse("HE12")})
    assert json.loads(text) == {"a": None, "b": 2.5, "c": [3], "m": "HE12"}


def test_config_defaults_and_overrides():
    cfg = apply_overrides(RunConfig(), {"spec.n_core": 1.45, "analysis.window": None})
    assert cfg.spec.n_core == 1.45 and cfg.analysis.window == 0.25e-3


def test_config_rejects_unknown_and_bad_values(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"profile": {"r0": 1e-6, "foo": 1}}))
    with pytest.raises(pydantic.ValidationError):
        load_config(path)
    path.write_text(json.dumps({"modes": ["XY99"]}))
    with pytest.raises(pydantic.ValidationError):
        load_config(path)
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        load_config(path)
