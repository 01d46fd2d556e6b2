import json
import logging
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrviz import examples, ingest
from corrviz.errors import ParseError, ValidationError
from corrviz.stats import DataSet

from .oracles import random_spd


def _random_dataset(rng, n, with_models=True):
    x = np.cumsum(rng.uniform(0.1, 2.0, n))
    models = (("a", rng.standard_normal(n)), ("b", rng.standard_normal(n))) if with_models else ()
    return DataSet(x, rng.standard_normal(n) * 10, random_spd(rng, n), models=models)


def test_json_round_trip_is_exact(rng):
    ds = _random_dataset(rng, 7)
    text = ingest.save_dataset(ds)
    back = ingest.load_dataset(text)
    assert back == ds
    assert ingest.save_dataset(back) == text
    jsonschema.validate(json.loads(text), ingest.DATASET_SCHEMA)


def test_csv_round_trip_is_exact(rng):
    ds = _random_dataset(rng, 5, with_models=False)
    text = ingest.save_dataset(ds, "csv")
    assert text.splitlines()[0] == "x,y,cov0,cov1,cov2,cov3,cov4"
    assert ingest.load_dataset(text, "csv") == ds


def test_csv_cannot_hold_models(demo):
    with pytest.raises(ValueError, match="models"):
        ingest.save_dataset(demo, "csv")


def test_load_from_path_uses_suffix(tmp_path, rng):
    ds = _random_dataset(rng, 3, with_models=False)
    (tmp_path / "d.csv").write_text(ingest.save_dataset(ds, "csv"))
    (tmp_path / "d.json").write_text(ingest.save_dataset(ds))
    assert ingest.load_dataset(tmp_path / "d.csv") == ds
    assert ingest.load_dataset(Path(tmp_path / "d.json")) == ds


def test_labels_and_axis_names_survive():
    ds = DataSet([1.0, 2.0], [3.0, 4.0], np.eye(2), labels=("a", "b"), x_label="pT", y_label="dN")
    back = ingest.load_dataset(ingest.save_dataset(ds))
    assert back.labels == ("a", "b") and back.x_label == "pT" and back.y_label == "dN"


@pytest.mark.parametrize(
    "mutate, error, match",
    [
        (lambda d: d.pop("covariance"), ValidationError, "covariance"),
        (lambda d: d.update(schema_version="2"), ValidationError, "schema_version"),
        (lambda d: d.update(extra=1), ValidationError, "extra"),
        (lambda d: d.update(y=[1, 2]), ValidationError, "y has 2"),
        (lambda d: d["covariance"].pop(), ValidationError, "rows"),
        (lambda d: d["covariance"][1].pop(), ValidationError, r"covariance\[1\]"),
        (lambda d: d["covariance"][0].__setitem__(1, 5.0), ValidationError, "symmetric"),
        (lambda d: d.update(x=[1, "a", 3]), ValidationError, "x/1"),
    ],
)
def test_json_validation_errors(demo, mutate, error, match):
    data = json.loads(ingest.save_dataset(demo))
    mutate(data)
    with pytest.raises(error, match=match):
        ingest.load_dataset(json.dumps(data))


def test_json_syntax_error_has_line():
    with pytest.raises(ParseError, match="line 2"):
        ingest.load_dataset('{\n  "x": [1,,]\n}')


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "empty"),
        ("a,b,c\n", "line 1"),
        ("x,y,cov0\n1,2\n", "line 2"),
        ("x,y,cov0,cov1\n1,2,1,0\n2,zz,0,1\n", "line 3"),
    ],
)
def test_csv_parse_errors(text, match):
    with pytest.raises(ParseError, match=match):
        ingest.load_dataset(text, "csv")


def test_csv_row_count_mismatch():
    with pytest.raises(ValidationError, match="rows"):
        ingest.load_dataset("x,y,cov0,cov1\n1,2,1,0\n", "csv")


def test_tiny_asymmetry_is_symmetrized_with_warning(caplog, demo):
    data = json.loads(ingest.save_dataset(demo))
    data["covariance"][0][1] += 1e-14
    with caplog.at_level(logging.WARNING, logger="corrviz"):
        ds = ingest.load_dataset(json.dumps(data))
    assert "symmetrized" in caplog.text
    assert np.array_equal(ds.cov, ds.cov.T)


def test_unknown_format(demo):
    with pytest.raises(ValueError):
        ingest.save_dataset(demo, "xml")


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(examples.KINDS), st.integers(0, 1000))
def test_examples_round_trip(kind, seed):
    ds = examples.generate(kind, seed=seed)
    assert ingest.load_dataset(ingest.save_dataset(ds)) == ds
