"""Batch evaluation of saliency-map localization against box and
segmentation ground truth, plus the associated image preprocessing."""

__version__ = "0.1.0"

from .core import (
    BoundingBox,
    containment,
    mask_counts,
    normalize_saliency,
    rasterize_box,
    union_masks,
)
from .metrics import (
    ANNOTATION_BOX,
    EXTERNAL_MASK,
    EvalRecord,
    auc_judd,
    auprc,
    evaluate_pair,
    pr_points,
    prevalence_baseline,
    roc_points_judd,
)

__all__ = [
    "ANNOTATION_BOX",
    "EXTERNAL_MASK",
    "BoundingBox",
    "EvalRecord",
    "auc_judd",
    "auprc",
    "containment",
    "evaluate_pair",
    "mask_counts",
    "normalize_saliency",
    "pr_points",
    "prevalence_baseline",
    "rasterize_box",
    "roc_points_judd",
    "union_masks",
]
