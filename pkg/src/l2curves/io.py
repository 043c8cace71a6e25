"""Sample files: CSV, JSON and SVG.

CSV files hold the columns ``s,x,y,u,v,kappa`` as 17-significant-digit
decimals, preceded by one ``#`` comment line with the metadata as compact
JSON (sorted keys). Writing a file that was read back reproduces it byte
for byte. JSON files carry the same columns plus the metadata object.
"""
from __future__ import annotations

import io as _io
import json
import math
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ._version import __version__
from .core import CurveSamples, numeric_curvature

COLUMNS = ("s", "x", "y", "u", "v", "kappa")
FORMAT_TAG = "l2curves-samples"

PathLike = Union[str, Path]


class SampleFileError(ValueError):
    """A samples file that cannot be parsed."""


def _fmt(value: float) -> str:
    return "%.17g" % value


def _canonical(meta: dict) -> str:
    return json.dumps(meta, sort_keys=True, separators=(",", ":"), allow_nan=False, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _sanitize(meta):
    """Replace non-finite floats (not valid JSON) by None, recursively."""
    if isinstance(meta, dict):
        return {str(k): _sanitize(v) for k, v in meta.items()}
    if isinstance(meta, (list, tuple)):
        return [_sanitize(v) for v in meta]
    if isinstance(meta, np.ndarray):
        return [_clean(v) for v in meta.tolist()]
    if isinstance(meta, (np.floating, np.integer)):
        return _clean(meta.item())
    if isinstance(meta, float):
        return _clean(meta)
    if hasattr(meta, "value") and not isinstance(meta, (str, int, bool)):
        return meta.value
    return meta


def sample_columns(samples: CurveSamples) -> dict[str, np.ndarray]:
    """The six output columns; kappa falls back to finite differences."""
    kappa = samples.kappa
    if kappa is None:
        kappa = numeric_curvature(samples.without_source())
    kappa = np.asarray(kappa, dtype=float) * np.ones_like(samples.s)
    return {"s": samples.s, "x": samples.x, "y": samples.y, "u": samples.u, "v": samples.v, "kappa": kappa}


def base_metadata(samples: CurveSamples, extra: Optional[dict] = None) -> dict:
    meta = {"format": FORMAT_TAG, "tool_version": __version__, "epsilon": int(samples.epsilon),
            "count": len(samples)}
    if extra:
        meta.update(extra)
    return _sanitize(meta)


def format_csv(samples: CurveSamples, metadata: Optional[dict] = None) -> str:
    meta = metadata if metadata is not None else base_metadata(samples)
    out = _io.StringIO()
    out.write("# " + _canonical(_sanitize(meta)) + "\n")
    out.write(",".join(COLUMNS) + "\n")
    cols = sample_columns(samples)
    for row in zip(*(cols[c] for c in COLUMNS)):
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def write_csv(samples: CurveSamples, path: PathLike, metadata: Optional[dict] = None) -> None:
    Path(path).write_text(format_csv(samples, metadata), encoding="utf-8", newline="")


def parse_csv(text: str) -> tuple[CurveSamples, dict]:
    """Samples and metadata from CSV text.

    Raises:
        SampleFileError: on a malformed header, row or metadata line.
    """
    lines = text.splitlines()
    meta: dict = {}
    i = 0
    if lines and lines[0].startswith("#"):
        try:
            meta = json.loads(lines[0][1:].strip() or "{}")
        except json.JSONDecodeError as exc:
            raise SampleFileError(f"line 1: bad metadata: {exc.msg}") from None
        if not isinstance(meta, dict):
            raise SampleFileError("line 1: metadata must be a JSON object")
        i = 1
    if i >= len(lines) or tuple(c.strip() for c in lines[i].split(",")) != COLUMNS:
        raise SampleFileError(f"line {i + 1}: expected header {','.join(COLUMNS)}")
    rows = []
    for n, line in enumerate(lines[i + 1:], start=i + 2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(COLUMNS):
            raise SampleFileError(f"line {n}: expected {len(COLUMNS)} fields, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise SampleFileError(f"line {n}: non-numeric field") from None
    if len(rows) < 2:
        raise SampleFileError("need at least two sample rows")
    data = np.array(rows)
    return _from_columns(dict(zip(COLUMNS, data.T)), meta), meta


def _from_columns(cols: dict, meta: dict) -> CurveSamples:
    s = np.asarray(cols["s"], dtype=float)
    if np.any(np.diff(s) <= 0):
        raise SampleFileError("arc length s must be strictly increasing")
    x = np.asarray(cols["x"], dtype=float)
    y = np.asarray(cols["y"], dtype=float)
    kappa = np.asarray(cols["kappa"], dtype=float)
    eps = meta.get("epsilon")
    if eps is None:
        eps = _infer_epsilon(x, y)
    if eps not in (1, -1):
        raise SampleFileError(f"epsilon must be +1 or -1, got {eps!r}")
    return CurveSamples(s, x, y, int(eps), kappa, meta=dict(meta))


def _infer_epsilon(x: np.ndarray, y: np.ndarray) -> int:
    g = -np.diff(x) ** 2 + np.diff(y) ** 2
    return 1 if np.nanmedian(g) > 0 else -1


def read_csv(path: PathLike) -> tuple[CurveSamples, dict]:
    return parse_csv(Path(path).read_text(encoding="utf-8"))


def format_json(samples: CurveSamples, metadata: Optional[dict] = None) -> str:
    meta = metadata if metadata is not None else base_metadata(samples)
    cols = sample_columns(samples)
    doc = {"metadata": _sanitize(meta), "columns": list(COLUMNS),
           "data": {c: [_clean(float(v)) for v in cols[c]] for c in COLUMNS}}
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_json(samples: CurveSamples, path: PathLike, metadata: Optional[dict] = None) -> None:
    Path(path).write_text(format_json(samples, metadata), encoding="utf-8")


def parse_json(text: str) -> tuple[CurveSamples, dict]:
    try:
        doc = json.loads(text)
        meta = doc.get("metadata", {})
        data = doc["data"]
        cols = {c: np.array([np.nan if v is None else v for v in data[c]], dtype=float) for c in COLUMNS}
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise SampleFileError(f"not a samples JSON document: {exc}") from None
    return _from_columns(cols, meta), meta


def read_json(path: PathLike) -> tuple[CurveSamples, dict]:
    return parse_json(Path(path).read_text(encoding="utf-8"))


def read_samples(path: PathLike) -> tuple[CurveSamples, dict]:
    """Read a CSV or JSON samples file, chosen by extension (default CSV)."""
    if Path(path).suffix.lower() == ".json":
        return read_json(path)
    return read_csv(path)


def write_samples(samples: CurveSamples, path: PathLike, metadata: Optional[dict] = None) -> None:
    if Path(path).suffix.lower() == ".json":
        write_json(samples, path, metadata)
    else:
        write_csv(samples, path, metadata)


# -- SVG ------------------------------------------------------------------------

_PALETTE = ("#1f4e9c", "#b8321a", "#2d7d32", "#7b3fa0", "#b07a00")


def format_svg(curves: Sequence[CurveSamples], mirror: bool = True, size: int = 480,
               title: Optional[str] = None) -> str:
    """SVG drawing of curves with the light cone y = +-x dashed.

    Axes are equal-scaled. With ``mirror`` each curve is drawn together
    with its point reflection (x, y) -> (-x, -y), the other pseudopolar
    branch, in a lighter stroke.
    """
    paths = []
    for c in curves:
        ok = np.isfinite(c.x) & np.isfinite(c.y)
        paths.append((c.x[ok], c.y[ok]))
    pts = [p for p in paths if p[0].size]
    if mirror:
        pts = pts + [(-x, -y) for x, y in pts]
    if not pts:
        raise ValueError("nothing to plot")
    allx = np.concatenate([p[0] for p in pts])
    ally = np.concatenate([p[1] for p in pts])
    half = max(float(np.max(np.abs(allx))), float(np.max(np.abs(ally))), 1e-12) * 1.08
    margin = 12
    scale = (size - 2 * margin) / (2 * half)

    def sx(x):
        return margin + (x + half) * scale

    def sy(y):
        return size - margin - (y + half) * scale

    def polyline(x, y, colour, width, opacity):
        coords = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(x, y))
        return (f'<polyline fill="none" stroke="{colour}" stroke-width="{width}" '
                f'stroke-opacity="{opacity}" points="{coords}"/>')

    body = [
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{sx(-half):.3f}" y1="{sy(0):.3f}" x2="{sx(half):.3f}" y2="{sy(0):.3f}" stroke="#999" stroke-width="0.6"/>',
        f'<line x1="{sx(0):.3f}" y1="{sy(-half):.3f}" x2="{sx(0):.3f}" y2="{sy(half):.3f}" stroke="#999" stroke-width="0.6"/>',
        # light cone
        f'<line x1="{sx(-half):.3f}" y1="{sy(-half):.3f}" x2="{sx(half):.3f}" y2="{sy(half):.3f}" '
        'stroke="#888" stroke-width="0.8" stroke-dasharray="5,4"/>',
        f'<line x1="{sx(-half):.3f}" y1="{sy(half):.3f}" x2="{sx(half):.3f}" y2="{sy(-half):.3f}" '
        'stroke="#888" stroke-width="0.8" stroke-dasharray="5,4"/>',
    ]
    for i, (x, y) in enumerate(paths):
        colour = _PALETTE[i % len(_PALETTE)]
        if mirror:
            body.append(polyline(-x, -y, colour, 1.2, 0.35))
        body.append(polyline(x, y, colour, 1.6, 1.0))
    if title:
        body.append(f'<text x="{margin}" y="{margin + 8}" font-family="sans-serif" font-size="11">'
                    f"{_escape(title)}</text>")
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(curves: Sequence[CurveSamples], path: PathLike, **kw) -> None:
    Path(path).write_text(format_svg(curves, **kw), encoding="utf-8")
