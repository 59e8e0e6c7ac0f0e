import json
from fractions import Fraction

import numpy as np

from utils.fitting import LineFit
from utils.output import dumps_json, format_float, write_csv, write_json


def test_format_float():
    assert format_float(True) == "true"
    assert format_float(np.bool_(False)) == "false"
    assert format_float(None) == ""
    assert format_float(7) == "7"
    assert format_float(np.int64(3)) == "3"
    assert format_float(1 / 3) == "0.333333333333"
    assert format_float(Fraction(1, 8)) == "0.125"
    assert format_float(float("nan")) == "nan"
    assert format_float("2,1") == "2,1"


def test_csv_layout(tmp_path):
    path = write_csv(
        tmp_path / "nested" / "rows.csv",
        ("quantity", "n", "measured", "passed"),
        [{"quantity": "gap", "n": 1, "measured": 0.1, "passed": True}, {"quantity": "gap", "n": 2}],
    )
    assert path.read_bytes() == b"quantity,n,measured,passed\ngap,1,0.1,true\ngap,2,,\n"


def test_json_is_sorted_and_rounded(tmp_path):
    payload = {"b": 2 / 3, "a": [np.float64(0.1), Fraction(1, 4)], "fit": LineFit(1.0, 0.0, 1.0, 2)}
    text = dumps_json(payload)
    assert text.endswith("\n")
    assert list(json.loads(text)) == ["a", "b", "fit"]
    assert json.loads(text)["b"] == 0.666666666667
    assert json.loads(text)["fit"]["points"] == 2
    assert dumps_json({"x": float("inf")}) == '{\n  "x": "inf"\n}\n'
    path = write_json(tmp_path / "out.json", payload)
    assert path.read_text() == text
