"""Threshold-sweep localization metrics: AUC-Judd and AUPRC.

Both metrics consume only the ordering and tie structure of the saliency
values, so any strictly increasing rescaling of a map leaves the scores
bit-identical. Ground truth must contain at least one positive pixel
(and for ROC metrics at least one negative); degenerate masks raise
instead of yielding NaN so aggregates cannot be silently corrupted.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import as_mask, as_saliency, containment, mask_counts
from .errors import DegenerateMask, ShapeMismatch

ANNOTATION_BOX = "annotation_box"
EXTERNAL_MASK = "external_mask"
MASK_SOURCES = (ANNOTATION_BOX, EXTERNAL_MASK)


@dataclass(frozen=True)
class EvalRecord:
    """Per-image, per-mask-source metric bundle."""

    image_id: str
    mask_source: str
    positives: int
    negatives: int
    baseline_auprc: float
    auprc: float
    auc_judd: float
    containment_in_box: Optional[float] = None


def _checked_pair(sal, truth, need_negative):
    sal = as_saliency(sal)
    truth = as_mask(truth)
    if sal.shape != truth.shape:
        raise ShapeMismatch(sal.shape, truth.shape, "saliency vs ground truth")
    p, n = mask_counts(truth)
    if p == 0:
        raise DegenerateMask("ground truth has no positive pixels")
    if need_negative and n == 0:
        raise DegenerateMask("ground truth has no negative pixels")
    return sal, truth, p, n


def roc_points_judd(sal, truth):
    """ROC sweep over the saliency values found at ground-truth positives.

    A pixel is predicted positive when its saliency is >= the threshold.
    Returns (FPR, TPR) pairs anchored at (0, 0) and (1, 1), deduplicated,
    nondecreasing in both coordinates.
    """
    sal, truth, p, n = _checked_pair(sal, truth, need_negative=True)
    pos_vals = np.sort(sal[truth == 1], kind="stable")
    neg_vals = np.sort(sal[truth == 0], kind="stable")
    thresholds = np.unique(pos_vals)[::-1]

    # count of values >= t via binary search on the sorted arrays
    tp = p - np.searchsorted(pos_vals, thresholds, side="left")
    fp = n - np.searchsorted(neg_vals, thresholds, side="left")

    points = [(0.0, 0.0)]
    for f, t in zip(fp, tp):
        pt = (f / n, t / p)
        if pt != points[-1]:
            points.append(pt)
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    return points


def auc_judd(sal, truth):
    """Trapezoidal area under the Judd ROC curve."""
    pts = roc_points_judd(sal, truth)
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def _tie_blocks(sal, truth):
    """Cumulative (predicted_positives, true_positives) after each tie block."""
    flat = sal.ravel()
    labels = truth.ravel().astype(np.int64)
    order = np.argsort(-flat, kind="stable")
    vals = flat[order]
    cum_tp = np.cumsum(labels[order])
    # last index of each run of equal saliency values
    ends = np.flatnonzero(np.append(vals[:-1] != vals[1:], True))
    return ends + 1, cum_tp[ends]


def pr_points(sal, truth):
    """Precision-recall sweep with tied saliency values handled atomically.

    Pixels sharing a saliency value form one block; after each block the
    cumulative (recall, precision) point is emitted. Recall is nondecreasing.
    """
    sal, truth, p, _ = _checked_pair(sal, truth, need_negative=False)
    pp, tp = _tie_blocks(sal, truth)
    return [(t / p, t / k) for k, t in zip(pp, tp)]


def auprc(sal, truth):
    """Step-interpolated area under the precision-recall curve.

    Sum over tie blocks of (recall_i - recall_{i-1}) * precision_i, the
    average-precision convention; trapezoidal PR interpolation is known
    to overestimate.
    """
    sal, truth, p, _ = _checked_pair(sal, truth, need_negative=False)
    pp, tp = _tie_blocks(sal, truth)
    area = 0.0
    prev_tp = 0
    for k, t in zip(pp, tp):
        area += ((t - prev_tp) / p) * (t / k)
        prev_tp = t
    return area


def prevalence_baseline(truth):
    """P / (P + N): the AUPRC of an uninformative constant map."""
    p, n = mask_counts(truth)
    return p / (p + n)


def evaluate_pair(image_id, sal, truth, mask_source, box_mask=None):
    """Bundle both metrics plus baseline and counts into an EvalRecord.

    When evaluating an external mask and the prompting box mask is known,
    the containment of the truth mask inside the box is recorded too.
    """
    if mask_source not in MASK_SOURCES:
        raise ValueError(f"unknown mask source: {mask_source!r}")
    try:
        p, n = mask_counts(truth)
        record = EvalRecord(
            image_id=image_id,
            mask_source=mask_source,
            positives=p,
            negatives=n,
            baseline_auprc=prevalence_baseline(truth),
            auprc=auprc(sal, truth),
            auc_judd=auc_judd(sal, truth),
            containment_in_box=(
                containment(truth, box_mask)
                if box_mask is not None and mask_source == EXTERNAL_MASK
                else None
            ),
        )
    except Exception as exc:
        exc.args = (f"{image_id}: {exc}",) + exc.args[1:]
        raise
    return record


def dump_curve(points, path):
    """Write curve points as CSV with full float precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y\n")
        for x, y in points:
            fh.write(f"{x:.17g},{y:.17g}\n")
