"""SVG line chart of mean revenue against rho for one framing fraction."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .core import SCHEMES, Scheme
from .montecarlo import RevenueTable

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 60
COLORS = {Scheme.PPA: "#1f77b4", Scheme.PPI: "#2ca02c", Scheme.PPC: "#d62728"}
BAND_SIGMAS = 3.0


class MissingAlpha(ValueError):
    pass


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def _f(v: float) -> str:
    return f"{v:.2f}"


def render_svg(table: RevenueTable, alpha: float) -> str:
    series = {s: table.select(s, alpha) for s in SCHEMES}
    if not any(series.values()):
        raise MissingAlpha(f"alpha={alpha:g} not present in table")

    rows = [r for rs in series.values() for r in rs]
    x_lo = min(r.rho for r in rows)
    x_hi = max(r.rho for r in rows)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    y_max = max(r.mean_revenue + BAND_SIGMAS * r.std_error for r in rows)
    y_step = _nice_step(y_max if y_max > 0 else 1.0)
    y_hi = y_step * math.ceil((y_max if y_max > 0 else 1.0) / y_step)

    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def sx(rho: float) -> float:
        return LEFT + (rho - x_lo) / (x_hi - x_lo) * plot_w

    def sy(val: float) -> float:
        return TOP + plot_h - max(0.0, min(val, y_hi)) / y_hi * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2 - RIGHT / 2:.0f}" y="24" text-anchor="middle" font-size="15">'
        f"Expected revenue, alpha = {alpha:g}</text>",
    ]

    # axes and ticks
    out.append(
        f'<line x1="{LEFT}" y1="{TOP + plot_h}" x2="{LEFT + plot_w}" y2="{TOP + plot_h}" stroke="black"/>'
    )
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}" stroke="black"/>')
    x_step = _nice_step(x_hi - x_lo, 5)
    k = math.ceil(x_lo / x_step - 1e-9)
    while k * x_step <= x_hi + 1e-9:
        t = k * x_step
        out.append(
            f'<line x1="{_f(sx(t))}" y1="{TOP + plot_h}" x2="{_f(sx(t))}" y2="{TOP + plot_h + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_f(sx(t))}" y="{TOP + plot_h + 20}" text-anchor="middle">{t:g}</text>'
        )
        k += 1
    k = 0
    while k * y_step <= y_hi + 1e-9:
        t = k * y_step
        out.append(
            f'<line x1="{LEFT - 5}" y1="{_f(sy(t))}" x2="{LEFT + plot_w}" y2="{_f(sy(t))}" '
            f'stroke="#dddddd"/>'
        )
        out.append(
            f'<text x="{LEFT - 8}" y="{_f(sy(t) + 4)}" text-anchor="end">{t:g}</text>'
        )
        k += 1
    out.append(
        f'<text x="{LEFT + plot_w / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">'
        "rho (value/attention correlation)</text>"
    )
    out.append(
        f'<text x="18" y="{TOP + plot_h / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + plot_h / 2:.0f})">mean revenue</text>'
    )

    for s in SCHEMES:
        pts = series[s]
        if not pts:
            continue
        color = COLORS[s]
        upper = [f"{_f(sx(r.rho))},{_f(sy(r.mean_revenue + BAND_SIGMAS * r.std_error))}" for r in pts]
        lower = [
            f"{_f(sx(r.rho))},{_f(sy(r.mean_revenue - BAND_SIGMAS * r.std_error))}"
            for r in reversed(pts)
        ]
        out.append(
            f'<polygon class="band" points="{" ".join(upper + lower)}" fill="{color}" '
            'fill-opacity="0.2" stroke="none"/>'
        )
        line = " ".join(f"{_f(sx(r.rho))},{_f(sy(r.mean_revenue))}" for r in pts)
        out.append(
            f'<polyline class="series" data-scheme="{s.value}" points="{line}" fill="none" '
            f'stroke="{color}" stroke-width="2"/>'
        )

    lx = WIDTH - RIGHT + 20
    for k, s in enumerate(SCHEMES):
        y = TOP + 20 + 22 * k
        out.append(
            f'<line x1="{lx}" y1="{y}" x2="{lx + 24}" y2="{y}" stroke="{COLORS[s]}" stroke-width="3"/>'
        )
        out.append(f'<text x="{lx + 30}" y="{y + 4}">{escape(s.value)}</text>')
    out.append(
        f'<text x="{lx}" y="{TOP + 20 + 22 * len(SCHEMES) + 6}" font-size="10">'
        f"bands: +/-{BAND_SIGMAS:g} s.e.</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
