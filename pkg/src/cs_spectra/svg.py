"""Minimal deterministic SVG: a 64-bin histogram next to a unit-circle atom plot."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .measure import HIST_BINS, CircleMeasure, histogram

BAR = "#3b6ea8"
ATOM = "#c0392b"
AXIS = "#444444"


def _f(x: float) -> str:
    return f"{x:.4f}"


def measure_svg(m: CircleMeasure, bins: int = HIST_BINS) -> str:
    W, H, pad = 640, 300, 20
    hw = 360 - 2 * pad
    h = histogram(m, bins)
    top = max(float(h.max()) if len(h) else 0.0, 1e-300)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
             f'viewBox="0 0 {W} {H}">',
             f'<title>{escape(m.label)}</title>',
             f'<line x1="{pad}" y1="{H - pad}" x2="{pad + hw}" y2="{H - pad}" stroke="{AXIS}"/>']
    bw = hw / bins
    for i, v in enumerate(h):
        if v <= 0:
            continue
        bh = (H - 2 * pad) * float(v) / top
        parts.append(f'<rect x="{_f(pad + i * bw)}" y="{_f(H - pad - bh)}" width="{_f(bw)}" '
                     f'height="{_f(bh)}" fill="{BAR}"/>')
    cx, cy, r = 500, H / 2, 110
    parts.append(f'<circle cx="{cx}" cy="{_f(cy)}" r="{r}" fill="none" stroke="{AXIS}"/>')
    wmax = max((w for _, w in m.atoms), default=1.0)
    for theta, w in m.atoms:
        rr = 2 + 6 * math.sqrt(w / wmax)
        parts.append(f'<circle cx="{_f(cx + r * math.cos(theta))}" cy="{_f(cy - r * math.sin(theta))}" '
                     f'r="{_f(rr)}" fill="{ATOM}" fill-opacity="0.6"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
