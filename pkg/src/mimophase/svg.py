"""Two-panel MIMO Bode plot written as plain SVG text.

The upper panel shows singular values in dB and the lower panel the phases in
degrees, both over ``log10(omega)`` on the axis segments of a sweep.  Lines
are broken at detours so that curves are not joined across a zero or pole.
"""

from __future__ import annotations

import math

import numpy as np

from .phase_response import AXIS

__all__ = ["bode_svg"]

WIDTH, HEIGHT = 720, 560
MARGIN_L, MARGIN_R, MARGIN_T, GAP = 70, 20, 40, 50
PANEL_H = (HEIGHT - MARGIN_T - GAP - 40) // 2
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_ticks(lo, hi, target=6):
    span = hi - lo
    if span <= 0:
        return np.array([lo])
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def _segments(x, mask):
    """Index runs where ``mask`` holds and consecutive ``x`` increase."""
    runs, cur = [], []
    for k in range(len(x)):
        if mask[k] and (not cur or x[k] > x[cur[-1]]):
            cur.append(k)
        else:
            if len(cur) > 1:
                runs.append(cur)
            cur = [k] if mask[k] else []
    if len(cur) > 1:
        runs.append(cur)
    return runs


def _panel(out, top, x, ys, runs, xlim, ylabel, xticks):
    lo, hi = np.nanmin(ys), np.nanmax(ys)
    if not np.isfinite(lo) or hi - lo < 1e-9:
        lo, hi = (lo - 1.0, hi + 1.0) if np.isfinite(lo) else (-1.0, 1.0)
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R

    def px(v):
        return x0 + (v - xlim[0]) / (xlim[1] - xlim[0]) * (x1 - x0)

    def py(v):
        return top + (hi - v) / (hi - lo) * PANEL_H

    out.append(f'<rect x="{x0}" y="{top}" width="{x1 - x0}" height="{PANEL_H}" '
               'fill="none" stroke="#333"/>')
    for t in _nice_ticks(lo, hi):
        y = py(t)
        out.append(f'<line x1="{x0}" y1="{y:.2f}" x2="{x1}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{x0 - 6}" y="{y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{t:g}</text>')
    for t in xticks:
        xx = px(t)
        out.append(f'<line x1="{xx:.2f}" y1="{top}" x2="{xx:.2f}" y2="{top + PANEL_H}" '
                   'stroke="#ddd"/>')
        out.append(f'<text x="{xx:.2f}" y="{top + PANEL_H + 14}" font-size="11" '
                   f'text-anchor="middle">1e{int(t)}</text>')
    out.append(f'<text x="16" y="{top + PANEL_H / 2:.2f}" font-size="12" '
               f'transform="rotate(-90 16 {top + PANEL_H / 2:.2f})" '
               f'text-anchor="middle">{ylabel}</text>')
    for i in range(ys.shape[1]):
        color = COLORS[i % len(COLORS)]
        for run in runs:
            pts = " ".join(f"{px(x[k]):.2f},{py(ys[k, i]):.2f}" for k in run
                           if np.isfinite(ys[k, i]))
            if pts:
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                           'stroke-width="1.5"/>')


def bode_svg(curve, title=""):
    """SVG text for the singular values and phases of a sweep.

    Parameters
    ----------
    curve : PhaseResponseCurve
    title : str

    Returns
    -------
    str
    """
    c = curve.contour
    mask = (c.kind == AXIS) & np.isfinite(c.param) & (c.param > 0)
    with np.errstate(divide="ignore"):
        x = np.where(mask, np.log10(np.where(mask, c.param, 1.0)), np.nan)
    runs = _segments(x, mask)
    if not runs:
        raise ValueError("the sweep has no positive axis frequencies to plot")
    xs = x[mask]
    xlim = (math.floor(xs.min()), math.ceil(xs.max()))
    if xlim[1] == xlim[0]:
        xlim = (xlim[0] - 1, xlim[1] + 1)
    xticks = range(xlim[0], xlim[1] + 1)
    with np.errstate(divide="ignore"):
        mag = 20 * np.log10(np.where(curve.sigmas > 0, curve.sigmas, np.nan))
    ph = np.degrees(curve.phases)
    sel = np.zeros(len(x), bool)
    for run in runs:
        sel[run] = True
    mag = np.where(sel[:, None], mag, np.nan)
    ph = np.where(sel[:, None], ph, np.nan)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="22" font-size="14" '
                   f'text-anchor="middle">{_escape(title)}</text>')
    _panel(out, MARGIN_T, x, mag, runs, xlim, "singular values (dB)", xticks)
    _panel(out, MARGIN_T + PANEL_H + GAP, x, ph, runs, xlim, "phases (deg)", xticks)
    out.append(f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2}" y="{HEIGHT - 8}" '
               'font-size="12" text-anchor="middle">frequency (rad/s)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
