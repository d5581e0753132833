"""CSV output of experiment results and SVG regret plots."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from html import escape

from .runner import RunResult

REGRET_HEADER = ["policy", "t", "mean_regret", "stderr", "replicates"]
PULLS_HEADER = ["policy", "arm", "mean_pulls"]

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


class CsvFormatError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def regret_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REGRET_HEADER)
    for label in result.policies:
        mean, err = result.mean_regret[label], result.stderr[label]
        for i, t in enumerate(result.checkpoints):
            w.writerow([label, t, fmt(mean[i]), fmt(err[i]), result.replicates])
    return buf.getvalue()


def pulls_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PULLS_HEADER)
    for label in result.policies:
        for arm, n in enumerate(result.mean_pulls[label]):
            w.writerow([label, arm + 1, fmt(n)])
    return buf.getvalue()


def read_regret_csv(text: str) -> dict:
    """Parse a regret CSV into ``{policy: [(t, mean, stderr), ...]}``."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != REGRET_HEADER:
        raise CsvFormatError(f"header must be {','.join(REGRET_HEADER)}")
    curves = defaultdict(list)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(REGRET_HEADER):
            raise CsvFormatError(f"line {lineno}: expected {len(REGRET_HEADER)} fields, got {len(row)}")
        try:
            t, mean, err = int(row[1]), float(row[2]), float(row[3])
        except ValueError:
            raise CsvFormatError(f"line {lineno}: non-numeric value") from None
        if t < 1 or not (math.isfinite(mean) and math.isfinite(err)):
            raise CsvFormatError(f"line {lineno}: t must be >= 1 and values finite")
        curves[row[0]].append((t, mean, err))
    if not curves:
        raise CsvFormatError("no data rows")
    return {k: sorted(v) for k, v in curves.items()}


def regret_svg(curves: dict, reference: float | None = None, title: str = "Cumulative regret") -> str:
    """Regret against log-scaled time, one ``<path>`` per policy with a stderr band.

    ``reference`` draws the line ``reference * log(t)``.
    """
    width, height = 640, 420
    left, right, top, bottom = 70, 160, 40, 50
    pw, ph = width - left - right, height - top - bottom

    t_max = max(p[0] for pts in curves.values() for p in pts)
    x_hi = max(math.log10(t_max), 1.0)
    y_hi = max(p[1] + p[2] for pts in curves.values() for p in pts)
    if reference is not None:
        y_hi = max(y_hi, reference * math.log(t_max))
    y_hi = y_hi * 1.05 if y_hi > 0 else 1.0

    def x(t):
        return left + pw * math.log10(t) / x_hi

    def y(v):
        return top + ph * (1.0 - v / y_hi)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for k in range(int(math.floor(x_hi)) + 1):
        xt = x(10 ** k)
        out.append(f'<line x1="{xt:.2f}" y1="{top + ph}" x2="{xt:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{xt:.2f}" y="{top + ph + 18}" text-anchor="middle">1e{k}</text>')
    for k in range(6):
        v = y_hi * k / 5
        out.append(f'<line x1="{left - 5}" y1="{y(v):.2f}" x2="{left}" y2="{y(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y(v) + 4:.2f}" text-anchor="end">{v:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 10}" text-anchor="middle">t</text>')

    if reference is not None:
        out.append(f'<line class="reference" x1="{x(1):.2f}" y1="{y(0):.2f}" x2="{x(t_max):.2f}" '
                   f'y2="{y(reference * math.log(t_max)):.2f}" stroke="gray" stroke-dasharray="6,4"/>')

    for i, (label, pts) in enumerate(curves.items()):
        color = COLORS[i % len(COLORS)]
        upper = " ".join(f"{x(t):.2f},{y(m + e):.2f}" for t, m, e in pts)
        lower = " ".join(f"{x(t):.2f},{y(max(m - e, 0.0)):.2f}" for t, m, e in reversed(pts))
        out.append(f'<polygon class="band" points="{upper} {lower}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        d = " ".join(("M" if j == 0 else "L") + f"{x(t):.2f},{y(m):.2f}" for j, (t, m, _) in enumerate(pts))
        out.append(f'<path class="curve" data-policy="{escape(label)}" d="{d}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        ly = top + 10 + 18 * i
        out.append(f'<rect x="{left + pw + 15}" y="{ly - 8}" width="14" height="8" fill="{color}"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
