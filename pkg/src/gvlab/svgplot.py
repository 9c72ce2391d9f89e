"""Tiny self-contained SVG charts (line and scatter), no plotting dependency.

Charts are derived artifacts: CSV files remain the authoritative outputs,
and emitting or suppressing a chart never changes any CSV content.  All
coordinates are formatted with fixed precision so repeated runs produce
byte-identical files.
"""

from __future__ import annotations

from typing import Sequence

_WIDTH, _HEIGHT = 640, 440
_MARGIN = 60
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _scale(lo: float, hi: float) -> tuple[float, float]:
    if hi <= lo:
        pad = 0.5 if lo == 0 else abs(lo) * 0.05 + 1e-12
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def chart(series: Sequence[tuple[str, Sequence[float], Sequence[float]]], title: str,
          xlabel: str, ylabel: str, mode: str = "line", diagonal: bool = False) -> str:
    """Render named (x, y) series as an SVG document string.

    ``mode`` is "line" or "scatter"; ``diagonal`` adds a dashed y=x
    reference line (used by rank-vs-rank plots).
    """
    xs = [x for _, sx, _ in series for x in sx]
    ys = [y for _, _, sy in series for y in sy]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = _scale(min(xs), max(xs))
    y_lo, y_hi = _scale(min(ys), max(ys))
    if diagonal:
        lo = min(x_lo, y_lo)
        hi = max(x_hi, y_hi)
        x_lo = y_lo = lo
        x_hi = y_hi = hi

    def px(x: float) -> float:
        return _MARGIN + (x - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)

    def py(y: float) -> float:
        return _HEIGHT - _MARGIN - (y - y_lo) / (y_hi - y_lo) * (_HEIGHT - 2 * _MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 12}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="16" y="{_HEIGHT // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_HEIGHT // 2})">{ylabel}</text>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_WIDTH - 2 * _MARGIN}" '
        f'height="{_HEIGHT - 2 * _MARGIN}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{_fmt(px(t))}" y1="{_HEIGHT - _MARGIN}" x2="{_fmt(px(t))}" '
                   f'y2="{_HEIGHT - _MARGIN + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{_HEIGHT - _MARGIN + 18}" text-anchor="middle" '
                   f'font-size="10">{t:.3g}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{_MARGIN - 5}" y1="{_fmt(py(t))}" x2="{_MARGIN}" '
                   f'y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{_MARGIN - 8}" y="{_fmt(py(t) + 3)}" text-anchor="end" '
                   f'font-size="10">{t:.3g}</text>')
    if diagonal:
        out.append(f'<line x1="{_fmt(px(x_lo))}" y1="{_fmt(py(x_lo))}" x2="{_fmt(px(x_hi))}" '
                   f'y2="{_fmt(py(x_hi))}" stroke="gray" stroke-dasharray="4 3"/>')
    for i, (label, sx, sy) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        points = [(px(x), py(y)) for x, y in zip(sx, sy)]
        if mode == "line" and len(points) > 1:
            path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"/>')
        for x, y in points:
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>')
        out.append(f'<text x="{_WIDTH - _MARGIN - 4}" y="{_MARGIN + 16 + 14 * i}" '
                   f'text-anchor="end" font-size="11" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
