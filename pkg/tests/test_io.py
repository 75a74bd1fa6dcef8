import json
import math
import xml.etree.ElementTree as ET

import pytest

from mondrian_stit.geometry import Rect
from mondrian_stit.io import (
    csv_text,
    dumps,
    load_tessellation,
    save_tessellation,
    tessellation_from_dict,
    tessellation_svg,
    tessellation_to_dict,
    validate_report,
)
from mondrian_stit.sampler import SimParams, sample

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def tess():
    return sample(Rect(-1.0, 2.5, 0.25, 3.0), SimParams(0.37, 2.3, 99))


def test_round_trip_bit_exact(tess, tmp_path):
    path = tmp_path / "t.json"
    save_tessellation(tess, path)
    back = load_tessellation(path)
    assert back.window == tess.window and back.params == tess.params
    assert len(back.edges) == len(tess.edges)
    for a, b in zip(tess.edges, back.edges):
        assert a == b
        assert a.seg.fixed.hex() == b.seg.fixed.hex() and a.birth.hex() == b.birth.hex()
    assert path.read_text() == dumps(tessellation_to_dict(back))
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]


def test_unknown_version_rejected(tess):
    doc = tessellation_to_dict(tess)
    doc["version"] = 2
    with pytest.raises(ValueError, match="version"):
        tessellation_from_dict(doc)
    del doc["version"]
    with pytest.raises(ValueError, match="version"):
        tessellation_from_dict(doc)


def test_schema_violations(tess):
    doc = tessellation_to_dict(tess)
    doc["p"] = 1.5
    with pytest.raises(ValueError):
        tessellation_from_dict(doc)
    doc = tessellation_to_dict(tess)
    doc["edges"][0]["o"] = "D"
    with pytest.raises(ValueError):
        tessellation_from_dict(doc)


def test_broken_edge_list_rejected(tess):
    doc = tessellation_to_dict(tess)
    if not doc["edges"]:
        pytest.skip("empty tessellation")
    doc["edges"][0]["hi"] += 0.1
    with pytest.raises(ValueError):
        tessellation_from_dict(doc)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_tessellation(tmp_path / "nope.json")


def test_dumps_nan_to_null():
    assert json.loads(dumps({"a": math.nan, "b": [1.0, math.inf]})) == {"a": None, "b": [1.0, None]}


def test_svg(tess):
    root = ET.fromstring(tessellation_svg(tess, color_births=True))
    w = tess.window
    assert [float(v) for v in root.get("viewBox").split()] == [w.x_min, w.y_min, w.width, w.height]
    assert len(root.findall(f".//{SVG}line[@class='edge']")) == len(tess.edges)
    assert len(root.findall(f".//{SVG}rect[@class='frame']")) == 1


def test_svg_empty():
    empty = sample(Rect(0, 1, 0, 1), SimParams(0.5, 1e-300, 0))
    root = ET.fromstring(tessellation_svg(empty))
    assert not root.findall(f".//{SVG}line")


def test_csv_text():
    text = csv_text(["r", "k"], [[0.1, 1 / 3], [1.0, math.nan]])
    lines = text.splitlines()
    assert lines[0] == "r,k"
    assert float(lines[1].split(",")[1]) == 1 / 3
    assert lines[2] == "1.0,nan"


def test_validate_report():
    doc = {
        "version": 1,
        "config": {"window": [0, 1, 0, 1], "p": 0.5, "t": 1.0, "seed": 0, "n": 10},
        "threshold": 4.0, "max_abs_z": 1.0, "passed": True,
        "rows": [{"statistic": "x", "r": None, "estimate": 1.0, "se": 0.1, "theory": 1.0, "z": 0.0}],
    }
    validate_report(doc)
    bad = dict(doc, rows=[{"statistic": "x"}])
    with pytest.raises(ValueError):
        validate_report(bad)
    with pytest.raises(ValueError):
        validate_report(dict(doc, version="2.0"))
