"""Minimal hand-written SVG line plots and label maps (no plotting library)."""

from __future__ import annotations

import math
from html import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=55)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
LABEL_COLORS = {"Spreading": "#2ca02c", "Vanishing": "#d62728", "Indeterminate": "#bbbbbb"}


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    x = start
    while x <= hi + 1e-9 * step:
        out.append(round(x, 12))
        x += step
    return out


def _range(values):
    finite = np.concatenate([np.asarray(v, float)[np.isfinite(v)] for v in values])
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi == lo:
        pad = 1.0 if lo == 0 else abs(lo) * 0.1
        return lo - pad, hi + pad
    return lo, hi


def line_plot(series, title="", xlabel="", ylabel=""):
    """``series`` is a list of ``(label, x, y)``; returns the SVG document text."""
    x0, x1 = _range([s[1] for s in series])
    y0, y1 = _range([s[2] for s in series])
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + ph - (y - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        X = sx(t)
        parts.append(f'<line x1="{X:.2f}" y1="{MARGIN["top"] + ph}" x2="{X:.2f}" '
                     f'y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{X:.2f}" y="{MARGIN["top"] + ph + 18}" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        Y = sy(t)
        parts.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y:.2f}" x2="{MARGIN["left"]}" '
                     f'y2="{Y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN["left"] - 8}" y="{Y + 4:.2f}" '
                     f'text-anchor="end">{t:g}</text>')
    parts.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 12}" '
                 f'text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(f'<text x="16" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>')
    for i, (label, x, y) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        x, y = np.asarray(x, float), np.asarray(y, float)
        ok = np.isfinite(x) & np.isfinite(y)
        if ok.sum() > 1500:
            idx = np.flatnonzero(ok)
            ok = np.zeros_like(ok)
            ok[idx[np.linspace(0, idx.size - 1, 1500).astype(int)]] = True
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        if pts:
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN["top"] + 16 + 16 * i
        lx = MARGIN["left"] + pw - 130
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 26}" y="{ly}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def label_map(x_values, y_values, labels, title="", xlabel="", ylabel=""):
    """Grid of coloured cells; ``labels[i][j]`` belongs to ``(x_values[j], y_values[i])``.

    Each cell shows two halves (species 1 left, species 2 right) when the label
    is a pair.
    """
    nx, ny = len(x_values), len(y_values)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    cw, ch = pw / nx, ph / ny
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for i in range(ny):
        for j in range(nx):
            cell = labels[i][j]
            pair = cell if isinstance(cell, (tuple, list)) else (cell,)
            x = MARGIN["left"] + j * cw
            y = MARGIN["top"] + (ny - 1 - i) * ch
            w = cw / len(pair)
            for m, lab in enumerate(pair):
                color = LABEL_COLORS.get(lab, "#000000")
                parts.append(f'<rect x="{x + m * w:.2f}" y="{y:.2f}" width="{w:.2f}" '
                             f'height="{ch:.2f}" fill="{color}" stroke="white"><title>'
                             f'{escape(str(lab))}</title></rect>')
    for j, xv in enumerate(x_values):
        parts.append(f'<text x="{MARGIN["left"] + (j + 0.5) * cw:.2f}" y="{MARGIN["top"] + ph + 16}" '
                     f'text-anchor="middle">{xv:g}</text>')
    for i, yv in enumerate(y_values):
        parts.append(f'<text x="{MARGIN["left"] - 6}" y="{MARGIN["top"] + (ny - 1 - i + 0.5) * ch + 4:.2f}" '
                     f'text-anchor="end">{yv:g}</text>')
    parts.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 12}" '
                 f'text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(f'<text x="16" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
