"""Deterministic CSV and SVG output for entanglement-versus-q tables.

The SVG is written by hand so the bytes depend only on the data.
"""

from __future__ import annotations

import io
from typing import Sequence

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 180, 40, 70
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
CSV_HEADER = "q,family,entanglement"


def fmt12(x: float) -> str:
    return f"{x:.12g}"


def fmt6(x: float) -> str:
    return f"{x:.6g}"


def to_csv(rows: Sequence[tuple[int, str, float]]) -> str:
    out = io.StringIO(newline="")
    out.write(CSV_HEADER + "\n")
    for q, name, value in rows:
        out.write(f"{q},{name},{fmt12(value)}\n")
    return out.getvalue()


def parse_csv(text: str) -> list[tuple[int, str, float]]:
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing q,family,entanglement header")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        q, name, value = line.split(",")
        rows.append((int(q), name, float(value)))
    return rows


def series(rows):
    """{family: [(q, value), ...]} keeping first-seen family order."""
    out: dict[str, list[tuple[int, float]]] = {}
    for q, name, value in rows:
        out.setdefault(name, []).append((q, value))
    return out


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count)]


def to_svg(rows, title: str = "entanglement vs q", ylabel: str = "entanglement") -> str:
    data = series(rows)
    qs = [q for pts in data.values() for q, _ in pts]
    vs = [v for pts in data.values() for _, v in pts]
    if not qs:
        raise ValueError("nothing to plot")
    qlo, qhi = min(qs), max(qs)
    if qlo == qhi:
        qlo, qhi = qlo - 1, qhi + 1
    vlo, vhi = min(0.0, min(vs)), max(1.0, max(vs))
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP

    def px(q):
        return x0 + (q - qlo) / (qhi - qlo) * (x1 - x0)

    def py(v):
        return y0 - (v - vlo) / (vhi - vlo) * (y0 - y1)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{(x0 + x1) / 2:.2f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for q in _ticks(qlo, qhi):
        x = px(q)
        out.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{y0 + 20}" text-anchor="middle">{fmt6(q)}</text>')
    for v in _ticks(vlo, vhi):
        y = py(v)
        out.append(f'<line x1="{x0 - 5}" y1="{y:.2f}" x2="{x0}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<line x1="{x0}" y1="{y:.2f}" x2="{x1}" y2="{y:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{x0 - 8}" y="{y + 4:.2f}" text-anchor="end">{fmt6(v)}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 25}" text-anchor="middle">q</text>')
    out.append(f'<text x="20" y="{(y0 + y1) / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {(y0 + y1) / 2:.2f})">{ylabel}</text>')
    for k, (name, pts) in enumerate(data.items()):
        color = COLORS[k % len(COLORS)]
        path = " ".join(f"{px(q):.2f},{py(v):.2f}" for q, v in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{path}"/>')
        for q, v in pts:
            out.append(f'<circle cx="{px(q):.2f}" cy="{py(v):.2f}" r="3" fill="{color}"/>')
        ly = MARGIN_TOP + 20 + 22 * k
        out.append(f'<line x1="{x1 + 20}" y1="{ly}" x2="{x1 + 50}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x1 + 58}" y="{ly + 4}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
