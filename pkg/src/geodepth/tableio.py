"""Reading coordinate files and writing result tables.

Input is headerless CSV, one point per row: k floats for flat and
sphere data, d angles for the torus, k*k row-major entries for SPD
matrices. Output tables carry a commented metadata block so every file
records how to regenerate itself; floats are written with repr() so a
read-back is exact, and the JSON writer encodes the same values.
The SVG writer draws fixed-size scatter or line panels with no
dependencies; anything fancier belongs downstream.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = ["Table", "read_matrix", "read_table", "write_table", "write_svg"]


def read_matrix(path, expect_cols=None):
    """Parse a headerless CSV of floats; errors name the offending line."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = [cell.strip() for cell in line.split(",")]
            try:
                vals = [float(cell) for cell in parts]
            except ValueError:
                raise ValidationError(f"{path}, line {lineno}: not a number")
            if width is None:
                width = len(vals)
                if expect_cols is not None and width != expect_cols:
                    raise ValidationError(
                        f"{path}, line {lineno}: expected {expect_cols} columns, "
                        f"found {width}"
                    )
            elif len(vals) != width:
                raise ValidationError(
                    f"{path}, line {lineno}: expected {width} columns, "
                    f"found {len(vals)}"
                )
            rows.append(vals)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def _cell_str(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _cell_json(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


@dataclass
class Table:
    """Columns, rows, and the metadata block describing the run."""

    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValidationError("row width does not match columns")

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def write_table(table, path, fmt="csv"):
    if fmt == "csv":
        _write_csv(table, path)
    elif fmt == "json":
        _write_json(table, path)
    else:
        raise ValidationError(f"unknown table format {fmt!r}")


def _write_csv(table, path):
    lines = []
    for key, val in table.meta.items():
        lines.append(f"# {key}: {val}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_cell_str(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(table, path):
    doc = {
        "meta": {k: str(v) for k, v in table.meta.items()},
        "columns": list(table.columns),
        "rows": [[_cell_json(v) for v in row] for row in table.rows],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_table(path):
    """Read back a table written by write_table (either format)."""
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "{":
            doc = json.load(fh)
            rows = [tuple(r) for r in doc["rows"]]
            return Table(tuple(doc["columns"]), rows, dict(doc["meta"]))
        meta = {}
        columns = None
        rows = []
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("# "):
                key, _, val = line[2:].partition(": ")
                meta[key] = val
                continue
            cells = line.split(",")
            if columns is None:
                columns = tuple(cells)
                continue
            parsed = []
            for cell in cells:
                try:
                    parsed.append(int(cell))
                except ValueError:
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        parsed.append(cell)
            rows.append(tuple(parsed))
    if columns is None:
        raise ValidationError(f"{path}: not a table file")
    return Table(columns, rows, meta)


# ---------------------------------------------------------------------------
# svg
# ---------------------------------------------------------------------------

_W, _H = 640, 480
_PAD = 56


def _scale(vals):
    lo = min(vals)
    hi = max(vals)
    if hi <= lo:
        lo, hi = lo - 0.5, lo + 0.5
    span = hi - lo
    return lo, hi, span


def write_svg(table, path, x, ys, mode="scatter", title=""):
    """Plot columns ys against column x into a fixed 640x480 canvas.

    mode is scatter or line. Output is deterministic: coordinates are
    rounded to 0.01 px and the palette is fixed.
    """
    if not ys:
        raise ValidationError("need at least one y column")
    xv = [float(v) for v in table.column(x)]
    if not xv:
        raise ValidationError("empty table")
    series = [(name, [float(v) for v in table.column(name)]) for name in ys]
    xlo, xhi, xspan = _scale(xv)
    all_y = [v for _, col in series for v in col]
    ylo, yhi, yspan = _scale(all_y)

    def px(v):
        return _PAD + (v - xlo) / xspan * (_W - 2 * _PAD)

    def py(v):
        return _H - _PAD - (v - ylo) / yspan * (_H - 2 * _PAD)

    palette = ["#1f6f8b", "#c84b31", "#2d6a4f", "#8d5a97", "#b68d40", "#444444"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" '
        'stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" '
        'stroke="black"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv_t = xlo + frac * xspan
        yv_t = ylo + frac * yspan
        parts.append(
            f'<text x="{px(xv_t):.2f}" y="{_H - _PAD + 18}" font-size="11" '
            f'text-anchor="middle">{xv_t:.3g}</text>'
        )
        parts.append(
            f'<text x="{_PAD - 8}" y="{py(yv_t):.2f}" font-size="11" '
            f'text-anchor="end">{yv_t:.3g}</text>'
        )
    parts.append(
        f'<text x="{_W / 2:.0f}" y="{_H - 14}" font-size="12" '
        f'text-anchor="middle">{x}</text>'
    )
    if title:
        parts.append(
            f'<text x="{_W / 2:.0f}" y="22" font-size="13" '
            f'text-anchor="middle">{title}</text>'
        )
    for si, (name, col) in enumerate(series):
        color = palette[si % len(palette)]
        if mode == "line":
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xv, col))
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                'stroke-width="1.5"/>'
            )
        else:
            for a, b in zip(xv, col):
                parts.append(
                    f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" '
                    f'fill="{color}" fill-opacity="0.7"/>'
                )
        parts.append(
            f'<text x="{_W - _PAD + 4}" y="{_PAD + 16 * si + 10}" font-size="11" '
            f'fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
