"""Self-contained SVG failure-rate charts, no rendering dependencies.

Output is deterministic for a given input table: fixed canvas, fixed float
formatting, series ordered by system size.
"""

from __future__ import annotations

import math

__all__ = ["render_sweep_svg"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 72, 140, 40, 56


def _esc(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
             .replace('"', "&quot;"))


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") if v else "0"


def render_sweep_svg(rows: list[dict], title: str = "Logical failure rate",
                     log_y: bool = False, metadata: str | None = None) -> str:
    """Render sweep rows (dicts with L, p, failure_rate, ci_low, ci_high).

    One polyline per system size, one error bar per point, legend keyed by
    L.  A single point per series renders as a marker without a line.
    """
    if not rows:
        raise ValueError("empty table: nothing to plot")
    sizes = sorted({int(r["L"]) for r in rows})
    ps = [float(r["p"]) for r in rows]
    p_lo, p_hi = min(ps), max(ps)
    if p_hi == p_lo:
        p_lo, p_hi = p_lo - 0.005, p_hi + 0.005
    ys = [float(r[k]) for r in rows for k in ("failure_rate", "ci_low", "ci_high")]
    if log_y:
        floor = min([y for y in ys if y > 0], default=1e-4)
        y_lo, y_hi = floor / 2, max(max(ys), floor) * 1.3
        def y_px(v):
            v = max(v, y_lo)
            t = (math.log10(v) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
            return _H - _MB - t * (_H - _MT - _MB)
    else:
        y_lo, y_hi = 0.0, max(max(ys), 1e-9) * 1.1
        def y_px(v):
            return _H - _MB - (v - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    def x_px(p):
        return _ML + (p - p_lo) / (p_hi - p_lo) * (_W - _ML - _MR)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" version="1.1">']
    if metadata:
        out.append(f"<metadata>{_esc(metadata)}</metadata>")
    out.append('<rect width="100%" height="100%" fill="#ffffff"/>')
    out.append(f'<text x="{_W/2:.1f}" y="22" text-anchor="middle" font-size="15" '
               f'font-family="sans-serif">{_esc(title)}</text>')
    # axes
    out.append(f'<line x1="{_ML}" y1="{_H-_MB}" x2="{_W-_MR}" y2="{_H-_MB}" '
               'stroke="#000" stroke-width="1.2"/>')
    out.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H-_MB}" '
               'stroke="#000" stroke-width="1.2"/>')
    out.append(f'<text x="{(_ML+_W-_MR)/2:.1f}" y="{_H-16}" text-anchor="middle" '
               'font-size="13" font-family="sans-serif">physical error rate p</text>')
    out.append(f'<text x="18" y="{(_MT+_H-_MB)/2:.1f}" text-anchor="middle" font-size="13" '
               f'font-family="sans-serif" transform="rotate(-90 18 {(_MT+_H-_MB)/2:.1f})">'
               'logical failure rate</text>')
    # ticks
    for i in range(5):
        p = p_lo + (p_hi - p_lo) * i / 4
        x = x_px(p)
        out.append(f'<line x1="{x:.1f}" y1="{_H-_MB}" x2="{x:.1f}" y2="{_H-_MB+4}" stroke="#000"/>')
        out.append(f'<text x="{x:.1f}" y="{_H-_MB+18}" text-anchor="middle" font-size="11" '
                   f'font-family="sans-serif">{p:.3f}</text>')
        if log_y:
            continue
        yv = y_lo + (y_hi - y_lo) * i / 4
        y = y_px(yv)
        out.append(f'<line x1="{_ML-4}" y1="{y:.1f}" x2="{_ML}" y2="{y:.1f}" stroke="#000"/>')
        out.append(f'<text x="{_ML-8}" y="{y+4:.1f}" text-anchor="end" font-size="11" '
                   f'font-family="sans-serif">{yv:.3f}</text>')
    if log_y:
        decade = math.floor(math.log10(y_lo))
        while 10 ** decade <= y_hi:
            y = y_px(10 ** decade)
            if _MT <= y <= _H - _MB:
                out.append(f'<line x1="{_ML-4}" y1="{y:.1f}" x2="{_ML}" y2="{y:.1f}" stroke="#000"/>')
                out.append(f'<text x="{_ML-8}" y="{y+4:.1f}" text-anchor="end" font-size="11" '
                           f'font-family="sans-serif">1e{decade}</text>')
            decade += 1

    for si, L in enumerate(sizes):
        color = _COLORS[si % len(_COLORS)]
        series = sorted((r for r in rows if int(r["L"]) == L), key=lambda r: float(r["p"]))
        pts = [(x_px(float(r["p"])), y_px(float(r["failure_rate"]))) for r in series]
        for r, (x, y) in zip(series, pts):
            ylo, yhi = y_px(float(r["ci_low"])), y_px(float(r["ci_high"]))
            out.append(f'<line x1="{x:.2f}" y1="{ylo:.2f}" x2="{x:.2f}" y2="{yhi:.2f}" '
                       f'stroke="{color}" stroke-width="1" class="errorbar"/>')
            out.append(f'<line x1="{x-3:.2f}" y1="{ylo:.2f}" x2="{x+3:.2f}" y2="{ylo:.2f}" '
                       f'stroke="{color}" stroke-width="1"/>')
            out.append(f'<line x1="{x-3:.2f}" y1="{yhi:.2f}" x2="{x+3:.2f}" y2="{yhi:.2f}" '
                       f'stroke="{color}" stroke-width="1"/>')
        if len(pts) > 1:
            path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                       'stroke-width="1.6"/>')
        for x, y in pts:
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
        ly = _MT + 18 * si
        out.append(f'<line x1="{_W-_MR+14}" y1="{ly:.1f}" x2="{_W-_MR+38}" y2="{ly:.1f}" '
                   f'stroke="{color}" stroke-width="1.6"/>')
        out.append(f'<text x="{_W-_MR+44}" y="{ly+4:.1f}" font-size="12" '
                   f'font-family="sans-serif">L = {L}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
