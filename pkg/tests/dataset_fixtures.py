"""Builders for synthetic on-disk evaluation datasets used by CLI and
acceptance tests."""

import json
import os

import numpy as np

from saliency_eval.core import BoundingBox, rasterize_box, union_masks
from saliency_eval.ingest import save_mask, save_saliency

GRID = 16  # saliency values are k/15 so 16-bit PNG round-trips preserve ranks


def random_box(rng, h, w):
    r0 = int(rng.integers(0, h - 1))
    c0 = int(rng.integers(0, w - 1))
    r1 = int(rng.integers(r0, min(h - 1, r0 + h // 2)))
    c1 = int(rng.integers(c0, min(w - 1, c0 + w // 2)))
    return BoundingBox(r0, c0, r1, c1)


def build_dataset(root, n_images, rng, with_masks=True, include_non_evaluable=0,
                  size=8):
    """Write annotations, saliency PNGs, optional mask PNGs, and a manifest.

    Returns (manifest_path, images) where images maps image_id to the
    in-memory arrays used to compute expected results independently.
    """
    root = str(root)
    os.makedirs(root, exist_ok=True)
    doc = []
    manifest_lines = ["image_id,annotation_path,saliency_path,mask_paths"]
    ann_path = os.path.join(root, "annotations.json")
    images = {}

    for i in range(n_images + include_non_evaluable):
        image_id = f"img{i:03d}"
        evaluable = i < n_images
        h = w = size
        objects = []
        boxes = []
        if evaluable:
            for _ in range(int(rng.integers(1, 3))):
                box = random_box(rng, h, w)
                boxes.append(box)
                objects.append({
                    "category": str(rng.choice(["ring", "trophozoite", "schizont"])),
                    "bounding_box": {
                        "min_r": box.min_r, "min_c": box.min_c,
                        "max_r": box.max_r, "max_c": box.max_c,
                    },
                })
        objects.append({
            "category": "rbc",
            "bounding_box": {"min_r": 0, "min_c": 0, "max_r": 0, "max_c": 0},
        })
        doc.append({"image": image_id, "width": w, "height": h, "objects": objects})

        sal = rng.integers(0, GRID, (h, w)).astype(np.float64) / (GRID - 1)
        sal_path = os.path.join(root, f"{image_id}_sal.png")
        save_saliency(sal, sal_path)

        box_mask = None
        ext_mask = None
        mask_paths = []
        if evaluable:
            box_mask = union_masks([rasterize_box(b, w, h) for b in boxes])
            # ensure the box ground truth is nondegenerate
            if box_mask.sum() == box_mask.size:
                box_mask[0, 0] = 0
                boxes = [BoundingBox(0, 1, h - 1, w - 1)]
                doc[-1]["objects"] = [{
                    "category": "ring",
                    "bounding_box": {"min_r": 0, "min_c": 1,
                                     "max_r": h - 1, "max_c": w - 1},
                }]
                box_mask = rasterize_box(boxes[0], w, h)
            if with_masks:
                # a random nonempty sub-mask of the box union
                ext_mask = (box_mask & (rng.random((h, w)) < 0.6)).astype(np.uint8)
                if ext_mask.sum() == 0:
                    ext_mask[boxes[0].min_r, boxes[0].min_c] = 1
                mask_path = os.path.join(root, f"{image_id}_mask.png")
                save_mask(ext_mask, mask_path)
                mask_paths.append(mask_path)
        manifest_lines.append(
            f"{image_id},{ann_path},{sal_path},{';'.join(mask_paths)}"
        )
        images[image_id] = {
            "saliency": sal,
            "box_mask": box_mask,
            "ext_mask": ext_mask,
            "evaluable": evaluable,
        }

    with open(ann_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    manifest_path = os.path.join(root, "manifest.csv")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(manifest_lines) + "\n")
    return manifest_path, images
