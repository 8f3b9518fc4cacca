"""Hand-emitted SVG reports (no charting dependency, bit-reproducible).

All coordinates are formatted with fixed precision and elements are
written in a deterministic order, so identical inputs give byte-identical
files. Only the generator version string may change between releases.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from . import __version__
from .curves import PathLossCurve
from .fom import FomReport

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 70, 20, 40, 60


def _f(v: float) -> str:
    return format(v, ".2f")


def format_band(hertz: float) -> str:
    if hertz >= 1e9:
        return f"{hertz / 1e9:g} GHz"
    if hertz >= 1e6:
        return f"{hertz / 1e6:g} MHz"
    if hertz >= 1e3:
        return f"{hertz / 1e3:g} kHz"
    return f"{hertz:g} Hz"


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" data-generator="ibobsim {__version__}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
    ]


def _axes(x0: float, y0: float, x1: float, y1: float) -> str:
    # y0 is the plot bottom in SVG coordinates (larger value), y1 the top.
    return (
        f'<path d="M {_f(x0)} {_f(y1)} L {_f(x0)} {_f(y0)} L {_f(x1)} {_f(y0)}" '
        'fill="none" stroke="#000000" stroke-width="1"/>'
    )


def fom_bar_chart(reports: list[FomReport], title: str = "Figure of merit by band") -> str:
    """One labeled bar per band, in the order given (rank first)."""
    if not reports:
        raise ValueError("no reports to chart")
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    values = [r.fom_db for r in reports]
    lo = min(0.0, min(values))
    hi = max(0.0, max(values))
    if hi == lo:
        hi = lo + 1.0
    span = hi - lo
    lo -= 0.05 * span
    hi += 0.10 * span

    def sy(v: float) -> float:
        return y0 - (v - lo) / (hi - lo) * (y0 - y1)

    parts = _header(title)
    for t in _nice_ticks(lo, hi):
        parts.append(
            f'<line x1="{_f(x0 - 4)}" y1="{_f(sy(t))}" x2="{_f(x1)}" y2="{_f(sy(t))}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_f(x0 - 8)}" y="{_f(sy(t) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{t:g}</text>'
        )
    slot = (x1 - x0) / len(reports)
    bar_w = slot * 0.6
    zero = sy(max(0.0, lo))
    for i, r in enumerate(reports):
        cx = x0 + slot * (i + 0.5)
        top = sy(max(r.fom_db, 0.0))
        bot = sy(min(r.fom_db, 0.0)) if lo < 0 else zero
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(
            f'<rect class="bar" x="{_f(cx - bar_w / 2)}" y="{_f(top)}" '
            f'width="{_f(bar_w)}" height="{_f(max(bot - top, 0.5))}" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_f(cx)}" y="{_f(top - 6)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{r.fom_db:.1f} dB</text>'
        )
        parts.append(
            f'<text x="{_f(cx)}" y="{_f(y0 + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{escape(format_band(r.band.hertz))}</text>'
        )
    parts.append(_axes(x0, y0, x1, y1))
    parts.append(
        f'<text x="20" y="{_f((y0 + y1) / 2)}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 20 {_f((y0 + y1) / 2)})">FoM (dB)</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def curves_chart(
    curves: list[tuple[str, PathLossCurve]], title: str = "Path loss vs distance"
) -> str:
    """Overlay line chart; one polyline per (label, curve)."""
    if not curves:
        raise ValueError("no curves to chart")
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    d_max = max(c.max_distance_m for _, c in curves)
    if d_max <= 0:
        d_max = 1.0
    all_losses = [l for _, c in curves for l in c.losses_db]
    lo, hi = min(all_losses), max(all_losses)
    if hi == lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo -= pad
    hi += pad

    def sx(d: float) -> float:
        return x0 + d / d_max * (x1 - x0)

    def sy(v: float) -> float:
        return y0 - (v - lo) / (hi - lo) * (y0 - y1)

    parts = _header(title)
    for t in _nice_ticks(lo, hi):
        parts.append(
            f'<line x1="{_f(x0 - 4)}" y1="{_f(sy(t))}" x2="{_f(x1)}" y2="{_f(sy(t))}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_f(x0 - 8)}" y="{_f(sy(t) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{t:g}</text>'
        )
    for t in _nice_ticks(0.0, d_max):
        parts.append(
            f'<line x1="{_f(sx(t))}" y1="{_f(y0)}" x2="{_f(sx(t))}" y2="{_f(y0 + 4)}" '
            'stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_f(sx(t))}" y="{_f(y0 + 16)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{t:g}</text>'
        )
    for i, (label, curve) in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_f(sx(d))},{_f(sy(l))}" for d, l in curve.samples)
        parts.append(
            f'<polyline class="curve" points="{points}" fill="none" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        ly = y1 + 14 + 14 * i
        parts.append(
            f'<line x1="{_f(x1 - 150)}" y1="{_f(ly - 4)}" x2="{_f(x1 - 130)}" y2="{_f(ly - 4)}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_f(x1 - 124)}" y="{_f(ly)}" font-family="sans-serif" '
            f'font-size="11">{escape(label)}</text>'
        )
    parts.append(_axes(x0, y0, x1, y1))
    parts.append(
        f'<text x="{_f((x0 + x1) / 2)}" y="{_f(_H - 20)}" text-anchor="middle" '
        'font-family="sans-serif" font-size="13">distance from body (m)</text>'
    )
    parts.append(
        f'<text x="20" y="{_f((y0 + y1) / 2)}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 20 {_f((y0 + y1) / 2)})">path loss (dB)</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
