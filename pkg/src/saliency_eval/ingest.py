"""Annotation parsing, raster file IO, and evaluation manifests.

File contracts:
  annotations  JSON list of {image, width, height, objects:[{category,
               bounding_box:{min_r,min_c,max_r,max_c}}]}, coordinates
               inclusive with origin top-left
  saliency     single-channel PNG, 8 or 16 bit, gray/65535 (or /255)
  mask         single-channel 8-bit PNG, nonzero = positive
  manifest     CSV "image_id,annotation_path,saliency_path,mask_paths",
               mask_paths a ';'-separated list (possibly empty)
"""

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .core import BoundingBox, rasterize_box, union_masks
from .errors import (
    BoxOutOfBounds,
    EmptyGroundTruth,
    FormatError,
    InvalidInput,
    ParseError,
    ShapeMismatch,
    UnknownCategory,
)
from .metrics import ANNOTATION_BOX, EXTERNAL_MASK

INFECTED = "infected"
UNINFECTED = "uninfected"

_UNINFECTED_CATEGORIES = {"red blood cell", "rbc", "leukocyte"}
_INFECTED_CATEGORIES = {"gametocyte", "ring", "trophozoite", "schizont"}


@dataclass(frozen=True)
class AnnotationRecord:
    category: str
    box: BoundingBox

    @property
    def label(self):
        return group_binary(self.category)


@dataclass
class ImageEntry:
    image_id: str
    width: int
    height: int
    annotations: list
    saliency_path: str = ""
    external_mask_paths: list = field(default_factory=list)

    @property
    def infected_boxes(self):
        return [a.box for a in self.annotations if a.label == INFECTED]

    @property
    def evaluable(self):
        """An image without infected annotations has empty box ground truth."""
        return len(self.infected_boxes) > 0


@dataclass(frozen=True)
class ManifestRow:
    image_id: str
    annotation_path: str
    saliency_path: str
    mask_paths: tuple


def group_binary(category):
    """Map an annotation category to the binary infected/uninfected label.

    Unknown categories are rejected, never guessed.
    """
    key = " ".join(category.strip().lower().replace("_", " ").split())
    if key in _UNINFECTED_CATEGORIES:
        return UNINFECTED
    if key in _INFECTED_CATEGORIES:
        return INFECTED
    raise UnknownCategory(category)


def load_annotations(path):
    """Parse an annotation document into ImageEntry objects.

    Boxes are validated in-bounds and categories must be known. Entries
    without infected annotations are kept but flag themselves as
    non-evaluable.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read annotations {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc

    if not isinstance(doc, list):
        raise ParseError(f"{path}: top level must be a list of image objects")

    entries = []
    seen = set()
    for i, item in enumerate(doc):
        ctx = f"{path}[{i}]"
        try:
            image_id = item["image"]
            width = int(item["width"])
            height = int(item["height"])
            objects = item["objects"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{ctx}: missing or malformed field: {exc}") from exc
        if image_id in seen:
            raise ParseError(f"{ctx}: duplicate image id {image_id!r}")
        seen.add(image_id)
        if width < 1 or height < 1:
            raise ParseError(f"{ctx}: nonpositive image dimensions")
        annotations = []
        for j, obj in enumerate(objects):
            try:
                category = obj["category"]
                bb = obj["bounding_box"]
                box = BoundingBox(
                    int(bb["min_r"]), int(bb["min_c"]), int(bb["max_r"]), int(bb["max_c"])
                )
            except (KeyError, TypeError, ValueError, InvalidInput) as exc:
                raise ParseError(f"{ctx}.objects[{j}]: {exc}") from exc
            if box.max_r >= height or box.max_c >= width:
                raise BoxOutOfBounds(box, width, height)
            group_binary(category)  # reject unknown categories early
            annotations.append(AnnotationRecord(category=category, box=box))
        entries.append(
            ImageEntry(image_id=image_id, width=width, height=height, annotations=annotations)
        )
    return entries


def ground_truth_mask(entry, source):
    """Build the ground-truth mask for one image from the requested source."""
    if source == ANNOTATION_BOX:
        boxes = entry.infected_boxes
        if not boxes:
            raise EmptyGroundTruth(f"{entry.image_id}: no infected annotations")
        return union_masks([rasterize_box(b, entry.width, entry.height) for b in boxes])
    if source == EXTERNAL_MASK:
        if not entry.external_mask_paths:
            raise EmptyGroundTruth(f"{entry.image_id}: no external mask files")
        masks = []
        for p in entry.external_mask_paths:
            m = load_mask(p)
            if m.shape != (entry.height, entry.width):
                raise ShapeMismatch((entry.height, entry.width), m.shape, p)
            masks.append(m)
        return union_masks(masks)
    raise InvalidInput(f"unknown ground-truth source: {source!r}")


def _open_gray(path):
    try:
        img = Image.open(path)
        img.load()
    except OSError as exc:
        raise FormatError(f"cannot read raster {path}: {exc}") from exc
    return img


def load_saliency(path):
    """Load a single-channel 8/16-bit PNG as scores in [0, 1]."""
    img = _open_gray(path)
    if img.mode in ("I", "I;16", "I;16B"):
        arr = np.asarray(img, dtype=np.float64)
        if arr.max(initial=0.0) > 65535:
            raise FormatError(f"{path}: sample values exceed 16-bit range")
        return arr / 65535.0
    if img.mode == "L":
        return np.asarray(img, dtype=np.float64) / 255.0
    raise FormatError(f"{path}: expected single-channel gray PNG, got mode {img.mode}")


def load_mask(path):
    """Load a single-channel 8-bit PNG; any nonzero sample is positive."""
    img = _open_gray(path)
    if img.mode != "L":
        raise FormatError(f"{path}: expected 8-bit single-channel PNG, got mode {img.mode}")
    return (np.asarray(img) != 0).astype(np.uint8)


def save_saliency(sal, path):
    """Write scores in [0, 1] as a 16-bit gray PNG."""
    arr = np.asarray(sal, dtype=np.float64)
    if arr.min(initial=0.0) < 0.0 or arr.max(initial=0.0) > 1.0:
        raise InvalidInput("saliency values must be in [0, 1] to serialize")
    Image.fromarray(np.round(arr * 65535.0).astype(np.uint16)).save(path)


def save_mask(mask, path):
    """Write a binary mask as an 8-bit gray PNG with positives at 255."""
    arr = (np.asarray(mask) != 0).astype(np.uint8) * 255
    Image.fromarray(arr, mode="L").save(path)


def load_manifest(path):
    """Parse the evaluation manifest CSV."""
    rows = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            expected = ["image_id", "annotation_path", "saliency_path", "mask_paths"]
            if reader.fieldnames != expected:
                raise ParseError(f"{path}: header must be {','.join(expected)}")
            for i, row in enumerate(reader):
                if any(row.get(k) is None for k in expected[:3]):
                    raise ParseError(f"{path} line {i + 2}: missing fields")
                mask_paths = tuple(p for p in (row["mask_paths"] or "").split(";") if p)
                rows.append(
                    ManifestRow(
                        image_id=row["image_id"],
                        annotation_path=row["annotation_path"],
                        saliency_path=row["saliency_path"],
                        mask_paths=mask_paths,
                    )
                )
    except OSError as exc:
        raise ParseError(f"cannot read manifest {path}: {exc}") from exc
    ids = [r.image_id for r in rows]
    if len(set(ids)) != len(ids):
        raise ParseError(f"{path}: duplicate image ids in manifest")
    return rows


def build_entries(manifest_rows):
    """Join manifest rows with their annotation documents.

    Every referenced file must exist before any evaluation starts.
    """
    missing = []
    for row in manifest_rows:
        for p in (row.annotation_path, row.saliency_path, *row.mask_paths):
            if not os.path.isfile(p):
                missing.append((row.image_id, p))
    if missing:
        listing = "; ".join(f"{i}: {p}" for i, p in missing)
        raise ParseError(f"missing files referenced by manifest: {listing}")

    cache = {}
    entries = []
    for row in manifest_rows:
        if row.annotation_path not in cache:
            cache[row.annotation_path] = {
                e.image_id: e for e in load_annotations(row.annotation_path)
            }
        by_id = cache[row.annotation_path]
        if row.image_id not in by_id:
            raise ParseError(
                f"image {row.image_id!r} not found in {row.annotation_path}"
            )
        entry = by_id[row.image_id]
        entry.saliency_path = row.saliency_path
        entry.external_mask_paths = list(row.mask_paths)
        entries.append(entry)
    return entries
