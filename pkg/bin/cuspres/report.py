"""
Writers for result tables (CSV, JSON) and the static SVG scatter plot.
"""
import json
from typing import Dict, IO, Iterable, List, Optional, Sequence

import numpy as np

from cuspres import __version__
from cuspres.resonance import Resonance

CSV_HEADER = ["k", "re_lambda", "im_lambda", "residual", "iterations", "seed_re", "seed_im"]
FUNNEL_COLUMNS = ["lambda_minus_seed_abs"]
FIGURE_PREFIX = ["a", "b"]

SVG_WIDTH = 640
SVG_HEIGHT = 480
SVG_MARGIN = 60
SVG_TICKS = 5
SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def format_number(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def resonance_row(res: Resonance, funnel: bool = False, prefix: Optional[Dict] = None) -> Dict:
    row = dict(prefix or {})
    row.update({
        "k": res.k,
        "re_lambda": res.lam.real,
        "im_lambda": res.lam.imag,
        "residual": res.residual,
        "iterations": res.iterations,
        "seed_re": res.seed.real,
        "seed_im": res.seed.imag,
    })
    if funnel:
        row["lambda_minus_seed_abs"] = abs(res.lam - res.seed)
    return row


def write_csv(out: IO[str], header: Sequence[str], rows: Iterable[Dict]):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(format_number(row[name]) for name in header) + "\n")


def write_json(out: IO[str], meta: Dict, rows: List[Dict]):
    document = {"meta": dict(meta, version=__version__), "rows": rows}
    json.dump(document, out, indent=2)
    out.write("\n")


def _ticks(low: float, high: float) -> np.ndarray:
    return np.linspace(low, high, SVG_TICKS)


def write_svg(path: str, series: Dict[str, Sequence[complex]], title: str = "",
              reference_levels: Sequence[float] = ()):
    """
    Scatter of Re lambda against Im lambda, one color per series. The Im
    range always covers the reference levels, drawn as dashed lines.
    """
    points = [complex(z) for values in series.values() for z in values]
    xs = [z.real for z in points] or [0.0, 1.0]
    ys = [z.imag for z in points] + list(reference_levels) or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1, y_hi + 1
    pad_y = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    plot_w = SVG_WIDTH - 2 * SVG_MARGIN
    plot_h = SVG_HEIGHT - 2 * SVG_MARGIN

    def px(x):
        return SVG_MARGIN + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return SVG_HEIGHT - SVG_MARGIN - (y - y_lo) / (y_hi - y_lo) * plot_h

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
                f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">\n')
        f.write(f'  <rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>\n')
        if title:
            f.write(f'  <text x="{SVG_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
                    f'font-size="14">{title}</text>\n')

        # axes
        left, bottom = SVG_MARGIN, SVG_HEIGHT - SVG_MARGIN
        f.write(f'  <line x1="{left}" y1="{bottom}" x2="{SVG_WIDTH - SVG_MARGIN}" y2="{bottom}" stroke="black"/>\n')
        f.write(f'  <line x1="{left}" y1="{bottom}" x2="{left}" y2="{SVG_MARGIN}" stroke="black"/>\n')
        for x in _ticks(x_lo, x_hi):
            f.write(f'  <line x1="{px(x):.2f}" y1="{bottom}" x2="{px(x):.2f}" y2="{bottom + 5}" stroke="black"/>\n')
            f.write(f'  <text x="{px(x):.2f}" y="{bottom + 18}" text-anchor="middle" '
                    f'font-size="10">{x:.4g}</text>\n')
        for y in _ticks(y_lo, y_hi):
            f.write(f'  <line x1="{left - 5}" y1="{py(y):.2f}" x2="{left}" y2="{py(y):.2f}" stroke="black"/>\n')
            f.write(f'  <text x="{left - 8}" y="{py(y) + 3:.2f}" text-anchor="end" '
                    f'font-size="10">{y:.3g}</text>\n')
        f.write(f'  <text x="{SVG_WIDTH / 2:.1f}" y="{SVG_HEIGHT - 15}" text-anchor="middle" '
                f'font-size="12">Re λ</text>\n')
        f.write(f'  <text x="15" y="{SVG_HEIGHT / 2:.1f}" text-anchor="middle" font-size="12" '
                f'transform="rotate(-90 15 {SVG_HEIGHT / 2:.1f})">Im λ</text>\n')

        for level in reference_levels:
            f.write(f'  <line x1="{left}" y1="{py(level):.2f}" x2="{SVG_WIDTH - SVG_MARGIN}" '
                    f'y2="{py(level):.2f}" stroke="gray" stroke-dasharray="4 3"/>\n')

        for index, (label, values) in enumerate(series.items()):
            color = SERIES_COLORS[index % len(SERIES_COLORS)]
            f.write(f'  <g fill="{color}">\n')
            for z in values:
                z = complex(z)
                f.write(f'    <circle cx="{px(z.real):.2f}" cy="{py(z.imag):.2f}" r="2.5"/>\n')
            f.write("  </g>\n")
            f.write(f'  <text x="{SVG_WIDTH - SVG_MARGIN - 4}" y="{SVG_MARGIN + 14 * (index + 1)}" '
                    f'text-anchor="end" font-size="11" fill="{color}">{label}</text>\n')
        f.write("</svg>\n")
