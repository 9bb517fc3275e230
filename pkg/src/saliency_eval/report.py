"""Aggregation of per-image records into summary tables and report files."""

import json
import os
import statistics
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import InsufficientSources, InvalidInput
from .metrics import ANNOTATION_BOX, EXTERNAL_MASK

METRIC_FIELDS = ("auprc", "auc_judd")


@dataclass(frozen=True)
class SourceSummary:
    mean_auprc: float
    median_auprc: float
    mean_auc_judd: float
    median_auc_judd: float
    evaluated: int
    skipped: int


@dataclass(frozen=True)
class Histogram:
    metric: str
    mask_source: str
    bin_edges: tuple
    counts: tuple


@dataclass(frozen=True)
class ComparisonTable:
    """external_mask minus annotation_box, plus containment statistics."""

    delta_mean_auprc: float
    delta_median_auprc: float
    delta_mean_auc_judd: float
    delta_median_auc_judd: float
    mean_containment: Optional[float]
    containment_at_one: int
    containment_count: int


def aggregate(records, skipped=None):
    """Group records by mask source and compute mean/median of each metric.

    `skipped` maps source name to the count of images that could not be
    evaluated for it. Sources with no evaluated records but a nonzero
    skip count appear with absent (None) statistics, never zeros.
    """
    skipped = dict(skipped or {})
    by_source = {}
    for rec in records:
        by_source.setdefault(rec.mask_source, []).append(rec)

    table = {}
    for source in sorted(set(by_source) | set(skipped)):
        group = by_source.get(source, [])
        if group:
            table[source] = SourceSummary(
                mean_auprc=statistics.fmean(r.auprc for r in group),
                median_auprc=statistics.median(r.auprc for r in group),
                mean_auc_judd=statistics.fmean(r.auc_judd for r in group),
                median_auc_judd=statistics.median(r.auc_judd for r in group),
                evaluated=len(group),
                skipped=skipped.get(source, 0),
            )
        else:
            table[source] = SourceSummary(
                mean_auprc=None,
                median_auprc=None,
                mean_auc_judd=None,
                median_auc_judd=None,
                evaluated=0,
                skipped=skipped.get(source, 0),
            )
    return table


def histogram(records, metric, mask_source, bins=20):
    """Equal-width histogram of one metric over [0, 1] for one source.

    Bin membership is [edge_i, edge_{i+1}); the value 1.0 lands in the
    last bin.
    """
    if metric not in METRIC_FIELDS:
        raise InvalidInput(f"unknown metric: {metric!r}")
    if bins < 1:
        raise InvalidInput("bins must be >= 1")
    counts = [0] * bins
    for rec in records:
        if rec.mask_source != mask_source:
            continue
        v = getattr(rec, metric)
        counts[min(int(v * bins), bins - 1)] += 1
    edges = tuple(i / bins for i in range(bins + 1))
    return Histogram(metric=metric, mask_source=mask_source, bin_edges=edges, counts=tuple(counts))


def compare_sources(summary, records=()):
    """Paired deltas between the external-mask and annotation-box sources."""
    evaluated = {s for s, v in summary.items() if v.evaluated > 0}
    if len(evaluated) < 2:
        raise InsufficientSources(
            f"need >= 2 evaluated mask sources, have {sorted(evaluated)}"
        )
    ext = summary[EXTERNAL_MASK]
    box = summary[ANNOTATION_BOX]
    contain = [
        r.containment_in_box for r in records if r.containment_in_box is not None
    ]
    return ComparisonTable(
        delta_mean_auprc=ext.mean_auprc - box.mean_auprc,
        delta_median_auprc=ext.median_auprc - box.median_auprc,
        delta_mean_auc_judd=ext.mean_auc_judd - box.mean_auc_judd,
        delta_median_auc_judd=ext.median_auc_judd - box.median_auc_judd,
        mean_containment=statistics.fmean(contain) if contain else None,
        containment_at_one=sum(1 for c in contain if c == 1.0),
        containment_count=len(contain),
    )


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _svg_bars(hist):
    """Minimal deterministic bar chart."""
    width, height, pad = 640, 360, 30
    n = len(hist.counts)
    top = max(hist.counts) or 1
    bar_w = (width - 2 * pad) / n
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{pad}" y="20" font-family="monospace" font-size="14">'
        f"{hist.metric} / {hist.mask_source}</text>",
    ]
    for i, c in enumerate(hist.counts):
        h = (height - 2 * pad) * c / top
        x = pad + i * bar_w
        y = height - pad - h
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w * 0.9:.2f}" '
            f'height="{h:.2f}" fill="#4477aa"/>'
        )
    parts.append(f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
                 f'y2="{height - pad}" stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_report(summary, records, histograms, out_dir, config=None, comparison=None,
                skipped_ids=None, svg=False):
    """Write records.csv, summary.json, and per-histogram CSVs.

    Output is byte-deterministic: records are sorted by (image_id,
    mask_source), CSV floats carry six fractional digits, JSON keeps full
    precision with sorted keys.
    """
    from . import __version__

    os.makedirs(out_dir, exist_ok=True)
    ordered = sorted(records, key=lambda r: (r.image_id, r.mask_source))

    records_path = os.path.join(out_dir, "records.csv")
    with open(records_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("image_id,mask_source,positives,negatives,baseline_auprc,"
                 "auprc,auc_judd,containment_in_box\n")
        for r in ordered:
            fh.write(",".join([
                r.image_id,
                r.mask_source,
                str(r.positives),
                str(r.negatives),
                _fmt(r.baseline_auprc),
                _fmt(r.auprc),
                _fmt(r.auc_judd),
                _fmt(r.containment_in_box),
            ]) + "\n")

    doc = {
        "tool_version": __version__,
        "config": config or {},
        "sources": {s: asdict(v) for s, v in summary.items()},
        "comparison": asdict(comparison) if comparison is not None else None,
        "skipped_ids": {k: sorted(v) for k, v in (skipped_ids or {}).items()},
    }
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8",
              newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")

    for hist in histograms:
        name = f"histogram_{hist.metric}_{hist.mask_source}"
        with open(os.path.join(out_dir, name + ".csv"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("bin_start,bin_end,count\n")
            for i, c in enumerate(hist.counts):
                fh.write(f"{_fmt(hist.bin_edges[i])},{_fmt(hist.bin_edges[i + 1])},{c}\n")
        if svg:
            with open(os.path.join(out_dir, name + ".svg"), "w", encoding="utf-8",
                      newline="\n") as fh:
                fh.write(_svg_bars(hist))
