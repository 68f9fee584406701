"""Report emission for the evaluation protocol.

All files are byte-deterministic: fixed ordering, shortest-roundtrip float
repr, no timestamps.  The reproducibility header (version, seed, config
hash) goes into summary.txt.
"""

import csv
import os

from . import __version__
from .evaluation import NAIVE_LABEL


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_report(report, outdir, header_info=None, boxplot=False):
    """Emit per_series.csv, aggregate.csv, ranks.csv, nemenyi.csv, summary.txt."""
    os.makedirs(outdir, exist_ok=True)

    _write_csv(
        os.path.join(outdir, "per_series.csv"),
        ("site", "year", "method", "rmse", "negativity"),
        [(r.site_id, r.year, r.method, r.rmse, int(r.negativity)) for r in report.rows],
    )

    _write_csv(
        os.path.join(outdir, "aggregate.csv"),
        ("method", "count", "mean", "std", "median", "q1", "q3", "min", "max"),
        [
            (m, a.count, a.mean, a.std, a.median, a.q1, a.q3, a.min, a.max)
            for m, a in ((m, report.aggregates[m]) for m in report.methods)
        ],
    )

    nemenyi = report.nemenyi
    if nemenyi is not None:
        _write_csv(
            os.path.join(outdir, "ranks.csv"),
            ("method", "mean_rank"),
            [(m, float(nemenyi.mean_ranks[i])) for i, m in enumerate(nemenyi.methods)],
        )
        pair_rows = []
        for i, a in enumerate(nemenyi.methods):
            for j, b in enumerate(nemenyi.methods):
                if i < j:
                    pair_rows.append((
                        a,
                        b,
                        float(abs(nemenyi.mean_ranks[i] - nemenyi.mean_ranks[j])),
                        nemenyi.critical_difference,
                        int(nemenyi.significant[i, j]),
                    ))
        _write_csv(
            os.path.join(outdir, "nemenyi.csv"),
            ("method_a", "method_b", "rank_diff", "critical_difference", "significant"),
            pair_rows,
        )

    lines = [f"grassdisagg {__version__} evaluation report"]
    for key, value in (header_info or {}).items():
        lines.append(f"{key}: {value}")
    lines.append("")
    lines.append("method            count        mean      median   neg-series")
    for m in report.methods:
        a = report.aggregates[m]
        negs = sum(1 for r in report.rows if r.method == m and r.negativity)
        lines.append(f"{m:<16} {a.count:>6}  {a.mean:>10.4f}  {a.median:>10.4f}   {negs:>6}")
    if nemenyi is not None:
        lines.append("")
        lines.append(
            f"friedman statistic: {nemenyi.friedman_statistic:.4f}  "
            f"(k={len(nemenyi.methods)}, n={report.aggregates[nemenyi.methods[0]].count})"
        )
        lines.append(
            f"nemenyi critical difference (alpha={nemenyi.alpha}): "
            f"{nemenyi.critical_difference:.4f}"
        )
        order = sorted(range(len(nemenyi.methods)), key=lambda i: nemenyi.mean_ranks[i])
        lines.append("mean ranks (best first):")
        for i in order:
            lines.append(f"  {nemenyi.methods[i]:<16} {nemenyi.mean_ranks[i]:.4f}")
    for label, note in report.notes.items():
        lines.append(f"method {label} failed: {note}")
    with open(os.path.join(outdir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    if boxplot:
        write_boxplot_svg(report, os.path.join(outdir, "boxplot.svg"))


def write_ratio_report(study, outdir, header_info=None):
    """Emit init_ratios.csv and a per-method summary."""
    os.makedirs(outdir, exist_ok=True)
    _write_csv(
        os.path.join(outdir, "init_ratios.csv"),
        ("site", "year", "method", "rmse_concrete", "rmse_average", "ratio"),
        [
            (r.site_id, r.year, r.method, r.rmse_concrete, r.rmse_average,
             "" if r.ratio is None else r.ratio)
            for r in study.rows
        ],
    )
    lines = [f"grassdisagg {__version__} initialization-ratio study"]
    for key, value in (header_info or {}).items():
        lines.append(f"{key}: {value}")
    lines.append("")
    for label, stats in study.summaries.items():
        if stats["count"]:
            lines.append(
                f"{label:<16} n={stats['count']:<5} median={stats['median']:.4f} "
                f"mean={stats['mean']:.4f} q1={stats['q1']:.4f} q3={stats['q3']:.4f} "
                f"below1={stats['below_one']} absent={stats['absent']}"
            )
        else:
            lines.append(f"{label:<16} n=0 absent={stats['absent']}")
    with open(os.path.join(outdir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_boxplot_svg(report, path):
    """Minimal hand-rolled box plot of per-method RMSE distributions.

    Boxes span q1..q3 with the median marked, whiskers at min/max; the
    naive mean is a dashed reference line.
    """
    methods = report.methods
    stats = [report.aggregates[m] for m in methods]
    width, height = 80 + 90 * len(methods), 360
    top, bottom = 30, height - 50
    vmax = max(s.max for s in stats) * 1.05 or 1.0

    def ypos(v):
        return bottom - (bottom - top) * v / vmax

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="60" y1="{top}" x2="60" y2="{bottom}" stroke="black"/>',
        f'<line x1="60" y1="{bottom}" x2="{width - 20}" y2="{bottom}" stroke="black"/>',
    ]
    n_ticks = 5
    for i in range(n_ticks + 1):
        v = vmax * i / n_ticks
        y = ypos(v)
        parts.append(f'<line x1="55" y1="{y:.1f}" x2="60" y2="{y:.1f}" stroke="black"/>')
        parts.append(
            f'<text x="50" y="{y + 4:.1f}" font-size="11" text-anchor="end">{v:.1f}</text>'
        )
    if NAIVE_LABEL in report.aggregates:
        y = ypos(report.aggregates[NAIVE_LABEL].mean)
        parts.append(
            f'<line x1="60" y1="{y:.1f}" x2="{width - 20}" y2="{y:.1f}" '
            f'stroke="gray" stroke-dasharray="6,4"/>'
        )
    for i, (m, s) in enumerate(zip(methods, stats)):
        cx = 100 + 90 * i
        half = 28
        parts.append(
            f'<line x1="{cx}" y1="{ypos(s.min):.1f}" x2="{cx}" y2="{ypos(s.max):.1f}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<rect x="{cx - half}" y="{ypos(s.q3):.1f}" width="{2 * half}" '
            f'height="{ypos(s.q1) - ypos(s.q3):.1f}" fill="lightsteelblue" stroke="black"/>'
        )
        parts.append(
            f'<line x1="{cx - half}" y1="{ypos(s.median):.1f}" x2="{cx + half}" '
            f'y2="{ypos(s.median):.1f}" stroke="black" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{cx}" y="{bottom + 18}" font-size="11" text-anchor="middle">{m}</text>'
        )
    parts.append(
        f'<text x="15" y="{(top + bottom) / 2}" font-size="11" '
        f'transform="rotate(-90 15 {(top + bottom) / 2})" text-anchor="middle">RMSE</text>'
    )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
