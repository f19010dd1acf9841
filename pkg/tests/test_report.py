import json

import numpy as np

from poisson_widths.kernels import KernelParams
from poisson_widths.report import SCHEMA_VERSION, document, flatten, render, render_csv, render_json, render_text


def test_json_schema_first():
    text = render_json("theta", {"q": 0.5, "theta": 0.5})
    data = json.loads(text)
    assert list(data)[:2] == ["schema", "command"]
    assert data["schema"] == SCHEMA_VERSION
    assert data["theta"] == 0.5


def test_json_rows():
    data = json.loads(render_json("sweep", [{"q": 0.1}, {"q": 0.2}]))
    assert data["rows"] == [{"q": 0.1}, {"q": 0.2}]


def test_json_non_finite_values():
    data = json.loads(render_json("width", {"log_value": float("-inf"), "bound": float("inf")}))
    assert data["log_value"] == "-inf"
    assert data["bound"] == "inf"


def test_json_round_trips_floats():
    value = 0.1 + 0.2
    assert json.loads(render_json("x", {"v": value}))["v"] == value


def test_document_converts_records():
    doc = document("params", {"params": KernelParams(0.5, 1.0), "flag": np.bool_(True), "x": np.float64(2.5)})
    assert doc["params"] == {"q": 0.5, "beta": 1.0}
    assert doc["flag"] is True
    assert doc["x"] == 2.5


def test_flatten():
    flat = flatten({"a": {"b": 1, "c": {"d": 2}}, "e": [1, 2]})
    assert flat == {"a.b": 1, "a.c.d": 2, "e": "[1,2]"}


def test_csv_fixed_header():
    text = render_csv([{"q": 0.1, "n": 2, "error": None}], fields=("q", "n", "error"))
    lines = text.split("\r\n")
    assert lines[0] == "q,n,error"
    assert lines[1] == "0.1,2,"


def test_csv_quotes_commas():
    text = render_csv({"name": "a,b", "value": 1})
    assert '"a,b"' in text


def test_render_dispatch():
    assert render("json", "x", {"a": 1}).startswith("{")
    assert render("csv", "x", {"a": 1}).startswith("a\r\n")
    assert "x" in render_text("x", {"a": True})
