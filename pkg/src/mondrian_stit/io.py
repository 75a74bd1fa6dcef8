"""Serialization: tessellation JSON, reports, CSV tables and SVG drawings.

All writers go through :func:`atomic_write`, so a file is either absent or
complete.  JSON floats use Python's shortest round-trip representation, which
reads back bit-exactly.
"""

import csv
import io as _io
import json
import math
import os
import tempfile
from importlib import resources

import jsonschema

from .geometry import Orientation, Rect, Segment
from .sampler import MaximalEdge, SimParams, Tessellation, validate

SCHEMA_VERSION = 1


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_schema(name: str) -> dict:
    text = resources.files("mondrian_stit").joinpath("schemas", f"{name}.v{SCHEMA_VERSION}.json").read_text()
    return json.loads(text)


def _clean(obj):
    # NaN and infinities are not JSON; they become null.
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=1, sort_keys=True, allow_nan=False) + "\n"


def _check_version(doc, what):
    if not isinstance(doc, dict) or "version" not in doc:
        raise ValueError(f"{what}: missing schema version")
    major = doc["version"]
    if isinstance(major, str):
        major = major.split(".")[0]
    try:
        major = int(major)
    except (TypeError, ValueError):
        raise ValueError(f"{what}: unreadable schema version {doc['version']!r}") from None
    if major != SCHEMA_VERSION:
        raise ValueError(f"{what}: unsupported schema version {doc['version']!r} (expected {SCHEMA_VERSION})")


# --- tessellations -----------------------------------------------------------

def tessellation_to_dict(tess: Tessellation) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "window": tess.window.as_list(),
        "p": tess.params.p,
        "t": tess.params.t,
        "seed": tess.params.seed,
        "edges": [
            {"o": e.seg.orientation.value, "c": e.seg.fixed, "lo": e.seg.lo, "hi": e.seg.hi, "birth": e.birth}
            for e in tess.edges
        ],
    }


def tessellation_from_dict(doc: dict, what: str = "tessellation") -> Tessellation:
    """Build and validate a tessellation from its JSON document.

    Raises
    ------
    ValueError
        On an unknown schema version, a schema violation or a broken edge list.
    """
    _check_version(doc, what)
    try:
        jsonschema.validate(doc, load_schema("tessellation"))
    except jsonschema.ValidationError as exc:
        raise ValueError(f"{what}: {exc.message}") from None
    window = Rect(*doc["window"])
    params = SimParams(doc["p"], doc["t"], doc["seed"])
    edges = tuple(
        MaximalEdge(Segment(Orientation(e["o"]), e["c"], e["lo"], e["hi"]), e["birth"]) for e in doc["edges"]
    )
    tess = Tessellation(window, params, edges)
    validate(tess)
    return tess


def save_tessellation(tess: Tessellation, path) -> None:
    atomic_write(path, dumps(tessellation_to_dict(tess)))


def load_tessellation(path) -> Tessellation:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    return tessellation_from_dict(doc, what=str(path))


# --- reports -----------------------------------------------------------------

def validate_report(doc: dict) -> None:
    _check_version(doc, "report")
    try:
        jsonschema.validate(_clean(doc), load_schema("report"))
    except jsonschema.ValidationError as exc:
        raise ValueError(f"report: {exc.message}") from None


# --- CSV ---------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# --- SVG ---------------------------------------------------------------------

def _ramp(u: float) -> str:
    # Dark blue for early edges through to orange for late ones.
    u = min(max(u, 0.0), 1.0)
    r = int(round(20 + 220 * u))
    g = int(round(40 + 100 * u))
    b = int(round(140 - 120 * u))
    return f"#{r:02x}{g:02x}{b:02x}"


def tessellation_svg(tess: Tessellation, color_births: bool = False, pixels: int = 800) -> str:
    """SVG drawing with the window as viewBox and the y axis pointing up."""
    w = tess.window
    scale = max(w.width, w.height)
    stroke = 0.003 * scale
    aspect = w.height / w.width
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{pixels}" height="{int(round(pixels * aspect))}" '
        f'viewBox="{w.x_min!r} {w.y_min!r} {w.width!r} {w.height!r}">',
        f'<g transform="matrix(1 0 0 -1 0 {w.y_min + w.y_max!r})" stroke-linecap="square">',
        f'<rect class="frame" x="{w.x_min!r}" y="{w.y_min!r}" width="{w.width!r}" height="{w.height!r}" '
        f'fill="white" stroke="black" stroke-width="{2 * stroke!r}"/>',
    ]
    for e in tess.edges:
        (x1, y1), (x2, y2) = e.seg.endpoints()
        color = _ramp(e.birth / tess.params.t) if color_births else "black"
        out.append(
            f'<line class="edge" x1="{x1!r}" y1="{y1!r}" x2="{x2!r}" y2="{y2!r}" '
            f'stroke="{color}" stroke-width="{stroke!r}"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
