import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from l2curves import io as sio
from l2curves.core import CurveSamples

from conftest import family


def _samples(n=20, seed=0):
    rng = np.random.default_rng(seed)
    s = np.cumsum(rng.uniform(0.1, 1.0, n))
    return CurveSamples(s, rng.normal(size=n), rng.normal(size=n), 1, rng.normal(size=n))


def test_csv_layout():
    text = sio.format_csv(_samples(3), {"b": 1, "a": [1.5, None]})
    lines = text.splitlines()
    assert lines[0] == '# {"a":[1.5,null],"b":1}'
    assert lines[1] == "s,x,y,u,v,kappa"
    assert len(lines) == 5
    assert all(len(v.split(",")) == 6 for v in lines[2:])


def test_csv_uses_17_significant_digits():
    c = CurveSamples(np.array([0.1, 1 / 3]), np.array([2 / 3, 1.0]), np.array([0.0, 1e-300]), 1,
                     np.array([np.pi, -np.e]))
    row = sio.format_csv(c).splitlines()[2]
    assert row.split(",")[0] == "0.10000000000000001"
    assert row.split(",")[1] == "0.66666666666666663"


def test_csv_round_trip_is_byte_identical(tmp_path):
    c = family("sturm_extended", {"mu": 1.0}, 1, "minus")
    first = tmp_path / "a.csv"
    sio.write_csv(c, first, sio.base_metadata(c, {"family": "sturm_extended"}))
    back, meta = sio.read_csv(first)
    second = tmp_path / "b.csv"
    sio.write_csv(back, second, meta)
    assert first.read_bytes() == second.read_bytes()


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=2, max_size=12))
def test_round_trip_is_lossless(values):
    n = len(values)
    c = CurveSamples(np.arange(n, dtype=float), np.array(values), np.array(values[::-1]), -1, np.array(values))
    back, _ = sio.parse_csv(sio.format_csv(c))
    assert np.array_equal(back.x, c.x) and np.array_equal(back.y, c.y)
    assert sio.format_csv(back, sio.base_metadata(back)) == sio.format_csv(c, sio.base_metadata(c))


def test_json_mirrors_csv():
    c = _samples(5)
    meta = sio.base_metadata(c, {"tolerances": {"tol_verify": 1e-6}})
    doc = json.loads(sio.format_json(c, meta))
    assert doc["columns"] == list(sio.COLUMNS)
    assert doc["metadata"]["tool_version"]
    back, meta2 = sio.parse_json(sio.format_json(c, meta))
    assert np.array_equal(back.kappa, c.kappa) and meta2 == meta


def test_nan_curvature_is_null_in_json():
    c = _samples(4)
    c = CurveSamples(c.s, c.x, c.y, 1, np.array([np.nan, 1.0, 2.0, np.nan]))
    doc = json.loads(sio.format_json(c))
    assert doc["data"]["kappa"][0] is None
    back, _ = sio.parse_json(sio.format_json(c))
    assert np.isnan(back.kappa[0]) and back.kappa[1] == 1.0


@pytest.mark.parametrize("text, match", [
    ("# {not json\ns,x,y,u,v,kappa\n0,0,0,0,0,0\n1,0,1,1,1,0\n", "line 1"),
    ("s,x,y\n0,0,0\n", "expected header"),
    ("s,x,y,u,v,kappa\n0,0,0,0,0,0\n1,0,1,1,1\n", "line 3"),
    ("s,x,y,u,v,kappa\n0,0,0,0,0,0\n1,0,a,1,1,0\n", "non-numeric"),
    ("s,x,y,u,v,kappa\n1,0,0,0,0,0\n0,0,1,1,1,0\n", "increasing"),
    ('# {"epsilon": 2}\ns,x,y,u,v,kappa\n0,0,0,0,0,0\n1,0,1,1,1,0\n', "epsilon"),
])
def test_malformed_csv(text, match):
    with pytest.raises(sio.SampleFileError, match=match):
        sio.parse_csv(text)


def test_epsilon_inferred_without_metadata():
    back, _ = sio.parse_csv("s,x,y,u,v,kappa\n0,0,0,0,0,0\n1,0.1,1,1.1,0.9,0\n")
    assert back.epsilon == 1


def test_svg_has_light_cone_and_both_branches():
    c = family("sinusoidal", {"n": 2.0, "lam": 3.0})
    svg = sio.format_svg([c], title="a < b")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count('stroke-dasharray="5,4"') == 2
    assert svg.count("<polyline") == 2
    assert "a &lt; b" in svg
    assert sio.format_svg([c], mirror=False).count("<polyline") == 1


def test_svg_axes_are_equal_scaled():
    c = CurveSamples(np.array([0.0, 1.0]), np.array([0.0, 10.0]), np.array([0.0, 1.0]), -1)
    svg = sio.format_svg([c], mirror=False, size=200)
    pts = svg.split('points="')[1].split('"')[0].split()
    (x0, y0), (x1, y1) = [tuple(map(float, p.split(","))) for p in pts]
    assert (x1 - x0) == pytest.approx(10 * (y0 - y1), abs=0.02)  # 3-decimal coordinates
