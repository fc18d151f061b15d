"""Diagnostic SVG output by direct text templating.

Plots are diagnostics, not the experiment contract, so this stays free of
plotting dependencies: histograms, log-log scatter with a fitted line, and
the regime map over (d, alpha).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["svg_histogram", "svg_loglog", "svg_regime_map"]

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 60, 20, 30, 50


def _header(title):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="12">\n'
        f'<rect width="{_W}" height="{_H}" fill="white"/>\n'
        f'<text x="{_W / 2}" y="18" text-anchor="middle" font-size="14">{title}</text>\n'
    )


def _axes(x0, x1, y0, y1, xlabel, ylabel):
    px0, px1 = _ML, _W - _MR
    py0, py1 = _H - _MB, _MT
    parts = [
        f'<line x1="{px0}" y1="{py0}" x2="{px1}" y2="{py0}" stroke="black"/>',
        f'<line x1="{px0}" y1="{py0}" x2="{px0}" y2="{py1}" stroke="black"/>',
        f'<text x="{(px0 + px1) / 2}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{(py0 + py1) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(py0 + py1) / 2})">{ylabel}</text>',
        f'<text x="{px0}" y="{py0 + 16}" text-anchor="middle">{x0:.3g}</text>',
        f'<text x="{px1}" y="{py0 + 16}" text-anchor="middle">{x1:.3g}</text>',
        f'<text x="{px0 - 6}" y="{py0}" text-anchor="end">{y0:.3g}</text>',
        f'<text x="{px0 - 6}" y="{py1 + 4}" text-anchor="end">{y1:.3g}</text>',
    ]
    return "\n".join(parts) + "\n"


def _xmap(x, x0, x1):
    return _ML + (x - x0) / (x1 - x0) * (_W - _ML - _MR)


def _ymap(y, y0, y1):
    return (_H - _MB) - (y - y0) / (y1 - y0) * (_H - _MB - _MT)


def svg_histogram(values, path, title="histogram", bins=60, overlay_cdf=None):
    """Density histogram; overlay_cdf, when given, is drawn as the implied
    density polyline on the same axes (finite differences of the CDF)."""
    values = np.asarray(values, dtype=np.float64)
    counts, edges = np.histogram(values, bins=bins, density=True)
    x0, x1 = float(edges[0]), float(edges[-1])
    y0, y1 = 0.0, float(max(counts.max(), 1e-12)) * 1.08
    out = [_header(title), _axes(x0, x1, y0, y1, "value", "density")]
    for c, e0, e1 in zip(counts, edges[:-1], edges[1:]):
        if c <= 0:
            continue
        xl, xr = _xmap(e0, x0, x1), _xmap(e1, x0, x1)
        yt = _ymap(c, y0, y1)
        out.append(
            f'<rect x="{xl:.2f}" y="{yt:.2f}" width="{xr - xl:.2f}" '
            f'height="{(_H - _MB) - yt:.2f}" fill="steelblue" fill-opacity="0.7"/>'
        )
    if overlay_cdf is not None:
        grid = np.linspace(x0, x1, 200)
        dens = np.gradient(overlay_cdf(grid), grid)
        pts = " ".join(
            f"{_xmap(g, x0, x1):.2f},{_ymap(max(v, 0.0), y0, y1):.2f}"
            for g, v in zip(grid, dens)
        )
        out.append(f'<polyline points="{pts}" fill="none" stroke="crimson" stroke-width="2"/>')
    out.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("\n".join(out))


def svg_loglog(points, path, title="log-log", slope=None, intercept=None,
               xlabel="h", ylabel="value"):
    """Scatter of (x, y) on log10 axes with an optional fitted power line."""
    pts = [(float(x), float(y)) for x, y in points if x > 0 and y > 0]
    if not pts:
        raise ValueError("no positive points to plot")
    lx = [math.log10(p[0]) for p in pts]
    ly = [math.log10(p[1]) for p in pts]
    x0, x1 = min(lx) - 0.1, max(lx) + 0.1
    y0, y1 = min(ly) - 0.1, max(ly) + 0.1
    out = [_header(title),
           _axes(x0, x1, y0, y1, f"log10 {xlabel}", f"log10 {ylabel}")]
    for gx, gy in zip(lx, ly):
        out.append(
            f'<circle cx="{_xmap(gx, x0, x1):.2f}" cy="{_ymap(gy, y0, y1):.2f}" '
            f'r="3" fill="steelblue"/>'
        )
    if slope is not None and intercept is not None:
        # y = intercept + slope * x in log10 space
        ya = intercept + slope * x0
        yb = intercept + slope * x1
        out.append(
            f'<line x1="{_xmap(x0, x0, x1):.2f}" y1="{_ymap(ya, y0, y1):.2f}" '
            f'x2="{_xmap(x1, x0, x1):.2f}" y2="{_ymap(yb, y0, y1):.2f}" '
            f'stroke="crimson" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{_W - _MR - 6}" y="{_MT + 14}" text-anchor="end">'
            f'slope = {slope:.4f}</text>'
        )
    out.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("\n".join(out))


def svg_regime_map(labels, path, title="limit regime over (d, alpha)"):
    """Regime map: shaded NVM wedge 1-2d < alpha < 1, normal elsewhere, with
    the classified grid points drawn on top.

    labels: iterable of (d, alpha, label) with label in {"normal", "nvm"}.
    """
    x0, x1, y0, y1 = 0.0, 0.5, 0.0, 2.0
    out = [_header(title), _axes(x0, x1, y0, y1, "memory parameter d", "tail index alpha")]
    # NVM wedge: polygon (0,1) - (0.5,0) - (0.5,1)
    wedge = [(0.0, 1.0), (0.5, 0.0), (0.5, 1.0)]
    pts = " ".join(f"{_xmap(px, x0, x1):.2f},{_ymap(py, y0, y1):.2f}" for px, py in wedge)
    out.append(f'<polygon points="{pts}" fill="gold" fill-opacity="0.35"/>')
    out.append(
        f'<line x1="{_xmap(0, x0, x1):.2f}" y1="{_ymap(1, y0, y1):.2f}" '
        f'x2="{_xmap(0.5, x0, x1):.2f}" y2="{_ymap(0, y0, y1):.2f}" '
        f'stroke="crimson" stroke-width="1.5"/>'
    )
    out.append(
        f'<line x1="{_xmap(0, x0, x1):.2f}" y1="{_ymap(1, y0, y1):.2f}" '
        f'x2="{_xmap(0.5, x0, x1):.2f}" y2="{_ymap(1, y0, y1):.2f}" '
        f'stroke="crimson" stroke-width="1.5"/>'
    )
    out.append(
        f'<text x="{_xmap(0.38, x0, x1):.2f}" y="{_ymap(0.62, y0, y1):.2f}" '
        f'fill="darkgoldenrod">NVM</text>'
    )
    out.append(
        f'<text x="{_xmap(0.12, x0, x1):.2f}" y="{_ymap(0.3, y0, y1):.2f}">N(0,1)</text>'
    )
    out.append(
        f'<text x="{_xmap(0.2, x0, x1):.2f}" y="{_ymap(1.5, y0, y1):.2f}">N(0,1)</text>'
    )
    for d, alpha, label in labels:
        color = "darkgoldenrod" if label == "nvm" else "navy"
        out.append(
            f'<circle cx="{_xmap(d, x0, x1):.2f}" cy="{_ymap(alpha, y0, y1):.2f}" '
            f'r="5" fill="{color}"/>'
        )
    out.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("\n".join(out))
