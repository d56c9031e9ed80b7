"""Byte-stable CSV, JSON and SVG writers plus support-sample readers.

JSON numbers carry 17 significant digits (lossless for doubles); SVG
coordinates use fixed notation with 9 decimals.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .diagnostics import DiagnosticsRecord
from .errors import ConfigError, DegenerateCurvatureError
from .geometry import PlaneCurve, circle, curvature_of, curve_of, perturbed_circle
from .grid import Field, ThetaGrid, make_grid, resample

__all__ = [
    "SERIES_COLUMNS",
    "format_number",
    "snapshot_dict",
    "write_snapshot",
    "read_snapshot",
    "write_series",
    "read_series",
    "write_svg",
    "write_json",
    "load_support_samples",
    "initial_field",
]

SERIES_COLUMNS = DiagnosticsRecord.COLUMNS


def format_number(x: float) -> str:
    """17 significant digits in scientific notation; non-finite values as ``nan``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x + 0.0, ".16e")


def _json_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return format_number(x) if math.isfinite(x) else "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def write_json(data: dict, path) -> Path:
    """Deterministic JSON: key order as given, floats via :func:`format_number`."""
    path = Path(path)
    lines = ["{"]
    items = list(data.items())
    for i, (key, value) in enumerate(items):
        sep = "," if i < len(items) - 1 else ""
        lines.append(f"  {json.dumps(key)}: {_json_value(value)}{sep}")
    lines.append("}")
    path.write_text("\n".join(lines) + "\n")
    return path


def snapshot_dict(t: float, S: Field) -> dict:
    pts = curve_of(S)
    try:
        kappa = curvature_of(S).values
    except DegenerateCurvatureError:
        kappa = np.full(S.grid.n, np.nan)
    return {
        "t": float(t),
        "n": S.grid.n,
        "theta": S.grid.theta,
        "S": S.values,
        "x": pts.x,
        "y": pts.y,
        "kappa": kappa,
    }


def write_snapshot(t: float, S: Field, path) -> Path:
    return write_json(snapshot_dict(t, S), path)


def read_snapshot(path) -> tuple[float, Field]:
    data = json.loads(Path(path).read_text())
    values = np.asarray(data["S"], dtype=float)
    return float(data.get("t") or 0.0), Field(make_grid(values.shape[0]), values)


def write_series(records: Iterable[DiagnosticsRecord], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_COLUMNS)
        for rec in records:
            row = []
            for value in rec.as_row():
                if isinstance(value, bool):
                    row.append("true" if value else "false")
                else:
                    row.append(format_number(value))
            writer.writerow(row)
    return path


def read_series(path) -> list[dict]:
    out = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                {k: (v == "true") if k == "forcing_bound_ok" else float(v) for k, v in row.items()}
            )
    return out


def _fixed(x: float) -> str:
    s = format(float(x) + 0.0, ".9f")
    return "0.000000000" if s == "-0.000000000" else s


def write_svg(curve: PlaneCurve, path, stroke: str = "#1f4e79") -> Path:
    """Single closed path; the y axis is flipped so the picture is upright.

    The viewBox encloses every vertex with a margin of 5% of the larger
    bounding-box side.
    """
    path = Path(path)
    x = curve.x
    y = -curve.y
    xmin, xmax, ymin, ymax = x.min(), x.max(), y.min(), y.max()
    span = max(xmax - xmin, ymax - ymin)
    margin = 0.05 * span if span > 0 else 1.0
    box = (xmin - margin, ymin - margin, xmax - xmin + 2 * margin, ymax - ymin + 2 * margin)
    coords = [f"{_fixed(a)},{_fixed(b)}" for a, b in zip(x, y)]
    d = "M " + coords[0] + "".join(f" L {c}" for c in coords[1:]) + " Z"
    width = _fixed(0.005 * (span if span > 0 else 1.0))
    text = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{" ".join(_fixed(v) for v in box)}">\n'
        f'  <path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>\n'
        "</svg>\n"
    )
    path.write_text(text)
    return path


def load_support_samples(path) -> tuple[float, Field]:
    """Read ``S`` samples from a snapshot JSON, or a text/CSV file with one
    ``S`` value (or ``theta, S`` pair) per line. Returns ``(t, S)``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            return read_snapshot(path)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{path}: not a snapshot file ({exc})", "initial") from None
    values = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in line.replace(",", " ").split() if p]
        try:
            values.append(float(parts[-1]))
        except ValueError:
            if values:
                raise ConfigError(f"{path}: cannot parse {line!r}", "initial") from None
            continue  # header line
    try:
        grid = make_grid(len(values))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}", "initial") from None
    return 0.0, Field(grid, values)


def initial_field(descriptor: str, grid: ThetaGrid) -> tuple[float, Field]:
    """Build the initial support field named by a config ``initial`` value."""
    words = descriptor.split()
    if words[0] == "circle":
        return 0.0, circle(grid, float(words[1]))
    if words[0] == "perturbed_circle":
        return 0.0, perturbed_circle(grid, float(words[1]), int(float(words[2])), float(words[3]))
    t0, S = load_support_samples(descriptor)
    return t0, resample(S, grid)
