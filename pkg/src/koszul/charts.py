"""Rank-table artifacts: CSV files and deterministic SVG bigraded charts.

The CSV schema is fixed: header exactly ``s,t,rank,torsion``, one row per
nonzero bidegree sorted by (s, t), torsion invariants joined by ``;`` (the
column is empty over fields).  The SVG renderer is pure bookkeeping — integer
coordinates only, sorted iteration, no timestamps — so identical tables
produce byte-identical files.  Charts default to the Adams convention
(x = t - s, y = s); ``axes="cartesian"`` plots (x = t, y = s) instead.
"""
from __future__ import annotations

from pathlib import Path

CSV_HEADER = "s,t,rank,torsion"

AXIS_CHOICES = ("adams", "cartesian")

_CELL = 32
_LEFT, _RIGHT, _TOP, _BOTTOM = 56, 20, 20, 48


def normalize_table(table: dict) -> dict[tuple[int, int], tuple[int, tuple[int, ...]]]:
    """Coerce any rank table to {(s, t): (rank, torsion)} with zeros dropped.

    Values may be plain ranks, (rank, torsion) pairs, or any object with
    ``rank`` and ``torsion`` attributes (e.g. a homology entry).

    >>> normalize_table({(0, 0): 1, (1, 2): (0, (3,)), (2, 4): 0})
    {(0, 0): (1, ()), (1, 2): (0, (3,))}
    """
    out: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    for (s, t), value in sorted(table.items()):
        if hasattr(value, "rank"):
            rank, torsion = value.rank, tuple(value.torsion)
        elif isinstance(value, tuple):
            rank, torsion = int(value[0]), tuple(int(x) for x in value[1])
        else:
            rank, torsion = int(value), ()
        if rank or torsion:
            out[(s, t)] = (rank, torsion)
    return out


def csv_text(table: dict) -> str:
    """The CSV document for a rank table; sorted, newline-terminated."""
    lines = [CSV_HEADER]
    for (s, t), (rank, torsion) in normalize_table(table).items():
        lines.append(f"{s},{t},{rank}," + ";".join(str(x) for x in torsion))
    return "\n".join(lines) + "\n"


def write_csv(table: dict, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(csv_text(table), encoding="utf-8", newline="")
    return path


def parse_csv(text: str) -> dict[tuple[int, int], tuple[int, tuple[int, ...]]]:
    """Invert csv_text; raises ValueError naming the offending row."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}, "
                         f"got {lines[0].strip() if lines else 'an empty file'!r}")
    out: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    for row_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"row {row_no}: expected 4 columns, got {len(parts)}")
        try:
            s, t, rank = int(parts[0]), int(parts[1]), int(parts[2])
            torsion = tuple(int(x) for x in parts[3].split(";") if x.strip())
        except ValueError:
            raise ValueError(f"row {row_no}: non-integer field in {line!r}") from None
        if (s, t) in out:
            raise ValueError(f"row {row_no}: duplicate bidegree ({s},{t})")
        out[(s, t)] = (rank, torsion)
    return out


def read_csv(path: str | Path) -> dict[tuple[int, int], tuple[int, tuple[int, ...]]]:
    return parse_csv(Path(path).read_text(encoding="utf-8"))


def _marker_radius(rank: int) -> int:
    return 4 + 2 * min(max(rank, 1) - 1, 3)


def svg_text(table: dict, axes: str = "adams") -> str:
    """An SVG 1.1 chart of a rank table; empty tables give an empty grid."""
    if axes not in AXIS_CHOICES:
        raise ValueError(f"axes must be one of {AXIS_CHOICES}, got {axes!r}")
    points: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    for (s, t), value in normalize_table(table).items():
        x = t - s if axes == "adams" else t
        points[(x, s)] = value
    if points:
        xs = [x for x, _ in points]
        ys = [y for _, y in points]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
    else:
        x_lo, x_hi, y_lo, y_hi = 0, 4, 0, 3
    cols, rows = x_hi - x_lo + 1, y_hi - y_lo + 1
    width = _LEFT + cols * _CELL + _RIGHT
    height = _TOP + rows * _CELL + _BOTTOM

    def px(x: int) -> int:
        return _LEFT + (x - x_lo) * _CELL + _CELL // 2

    def py(y: int) -> int:
        return _TOP + (y_hi - y) * _CELL + _CELL // 2

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    grid_top, grid_bottom = _TOP, _TOP + rows * _CELL
    grid_left, grid_right = _LEFT, _LEFT + cols * _CELL
    for x in range(x_lo, x_hi + 2):
        gx = grid_left + (x - x_lo) * _CELL
        parts.append(f'<line x1="{gx}" y1="{grid_top}" x2="{gx}" y2="{grid_bottom}" '
                     'stroke="#dddddd" stroke-width="1"/>')
    for y in range(y_lo, y_hi + 2):
        gy = grid_top + (y - y_lo) * _CELL
        parts.append(f'<line x1="{grid_left}" y1="{gy}" x2="{grid_right}" y2="{gy}" '
                     'stroke="#dddddd" stroke-width="1"/>')
    for x in range(x_lo, x_hi + 1):
        parts.append(f'<text x="{px(x)}" y="{grid_bottom + 18}" font-size="11" '
                     f'text-anchor="middle" font-family="monospace">{x}</text>')
    for y in range(y_lo, y_hi + 1):
        parts.append(f'<text x="{grid_left - 8}" y="{py(y) + 4}" font-size="11" '
                     f'text-anchor="end" font-family="monospace">{y}</text>')
    x_title = "t - s" if axes == "adams" else "t"
    parts.append(f'<text x="{(grid_left + grid_right) // 2}" y="{height - 10}" '
                 f'font-size="12" text-anchor="middle" font-family="monospace">'
                 f'{x_title}</text>')
    parts.append(f'<text x="{grid_left - 8}" y="{grid_top - 6}" font-size="12" '
                 'text-anchor="end" font-family="monospace">s</text>')
    for (x, y), (rank, torsion) in sorted(points.items()):
        cx, cy = px(x), py(y)
        if rank:
            parts.append(f'<circle cx="{cx}" cy="{cy}" r="{_marker_radius(rank)}" '
                         'fill="#1f6feb"/>')
        if rank > 1:
            parts.append(f'<text x="{cx}" y="{cy + 4}" font-size="10" '
                         'text-anchor="middle" font-family="monospace" '
                         f'fill="white">{rank}</text>')
        if torsion:
            label = ";".join(str(v) for v in torsion)
            parts.append(f'<text x="{cx}" y="{cy + 14}" font-size="8" '
                         'text-anchor="middle" font-family="monospace" '
                         f'fill="#b3261e">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(table: dict, path: str | Path, axes: str = "adams") -> Path:
    path = Path(path)
    path.write_text(svg_text(table, axes=axes), encoding="utf-8", newline="")
    return path
