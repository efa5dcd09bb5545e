"""Minimal dependency-free SVG line plots and heatmaps."""
from __future__ import annotations

from html import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]
W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 50


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def line_plot(series, path, title="", xlabel="", ylabel="", logy=False) -> None:
    """``series``: list of dicts with keys x, y, label and optional dashed/markers."""
    xs = np.concatenate([np.asarray(s["x"], float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], float) for s in series])
    ok = np.isfinite(ys) & (ys > 0 if logy else True)
    x0, x1 = float(np.nanmin(xs)), float(np.nanmax(xs))
    yv = np.log10(ys[ok]) if logy else ys[ok]
    y0, y1 = float(yv.min()), float(yv.max())
    if logy:
        y0, y1 = np.floor(y0), np.ceil(y1)
    if y1 == y0:
        y1 = y0 + 1
    if x1 == x0:
        x1 = x0 + 1
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        v = np.log10(y) if logy else y
        return TOP + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{LEFT + pw / 2}" y="{H - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{TOP + ph / 2}" transform="rotate(-90 15 {TOP + ph / 2})" text-anchor="middle">{escape(ylabel)}</text>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{px(t):.1f}" y="{TOP + ph + 15}" text-anchor="middle">{t:.3g}</text>')
    yt = np.arange(y0, y1 + 1) if logy else _ticks(y0, y1)
    for t in yt:
        yy = TOP + (1 - (t - y0) / (y1 - y0)) * ph
        lab = f"1e{int(t)}" if logy else f"{t:.3g}"
        out.append(f'<text x="{LEFT - 5}" y="{yy + 4:.1f}" text-anchor="end">{lab}</text>')
        out.append(f'<line x1="{LEFT}" x2="{LEFT + pw}" y1="{yy:.1f}" y2="{yy:.1f}" stroke="#ddd"/>')
    for i, s in enumerate(series):
        color = s.get("color", PALETTE[i % len(PALETTE)])
        x = np.asarray(s["x"], float)
        y = np.asarray(s["y"], float)
        keep = np.isfinite(y) & ((y > 0) if logy else True)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[keep], y[keep]))
        dash = ' stroke-dasharray="5,4"' if s.get("dashed") else ""
        if pts:
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        if s.get("markers"):
            for a, b in zip(x[keep], y[keep]):
                out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" fill="{color}"/>')
        ly = TOP + 14 * i + 8
        out.append(f'<line x1="{W - RIGHT + 10}" x2="{W - RIGHT + 30}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{W - RIGHT + 35}" y="{ly + 4}">{escape(str(s.get("label", "")))}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out))


def heatmap(values, path, extent, title="", max_cells=200) -> None:
    """Grayscale heatmap of ``values[j, i]`` (row 0 at the bottom), values in [0, 1]."""
    v = np.asarray(values, float)
    sj = max(1, int(np.ceil(v.shape[0] / max_cells)))
    si = max(1, int(np.ceil(v.shape[1] / max_cells)))
    v = v[::sj, ::si]
    ny, nx = v.shape
    x0, x1, y0, y1 = extent
    pw, ph = W - LEFT - 40, H - TOP - BOTTOM
    cw, ch = pw / nx, ph / ny
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
    ]
    for j in range(ny):
        for i in range(nx):
            g = int(round(255 * (1 - np.clip(v[j, i], 0, 1))))
            out.append(
                f'<rect x="{LEFT + i * cw:.2f}" y="{TOP + (ny - 1 - j) * ch:.2f}" width="{cw + 0.05:.2f}" height="{ch + 0.05:.2f}" fill="rgb({g},{g},{g})"/>'
            )
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{LEFT}" y="{TOP + ph + 15}">{x0:.3g}</text>')
    out.append(f'<text x="{LEFT + pw}" y="{TOP + ph + 15}" text-anchor="end">{x1:.3g}</text>')
    out.append(f'<text x="{LEFT - 5}" y="{TOP + ph}" text-anchor="end">{y0:.3g}</text>')
    out.append(f'<text x="{LEFT - 5}" y="{TOP + 10}" text-anchor="end">{y1:.3g}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out))
