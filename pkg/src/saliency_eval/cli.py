"""Command-line entry point: eval, rasterize, and preprocess subcommands."""

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from PIL import Image

from . import ingest, preprocess, report
from .core import rasterize_box, union_masks
from .errors import (
    DegenerateMask,
    EmptyGroundTruth,
    SaliencyEvalError,
    ShapeMismatch,
)
from .metrics import (
    ANNOTATION_BOX,
    EXTERNAL_MASK,
    MASK_SOURCES,
    evaluate_pair,
    pr_points,
    roc_points_judd,
    dump_curve,
)

log = logging.getLogger("saliency_eval")


def _safe_id(image_id):
    return image_id.replace(os.sep, "_").replace("/", "_")


def _eval_task(args):
    """Evaluate one (image, mask source) pair; returns a tagged result.

    Top-level so it can cross a process-pool boundary. Expected
    conditions (no ground truth, degenerate mask) are skips; anything
    else is a failure for that pair.
    """
    entry, source, dump_dir = args
    try:
        truth = ingest.ground_truth_mask(entry, source)
    except EmptyGroundTruth as exc:
        return ("skip", entry.image_id, source, str(exc))
    try:
        sal = ingest.load_saliency(entry.saliency_path)
        if sal.shape != (entry.height, entry.width):
            raise ShapeMismatch((entry.height, entry.width), sal.shape, entry.saliency_path)
        box_mask = None
        if source == EXTERNAL_MASK and entry.infected_boxes:
            box_mask = union_masks(
                [rasterize_box(b, entry.width, entry.height) for b in entry.infected_boxes]
            )
        record = evaluate_pair(entry.image_id, sal, truth, source, box_mask=box_mask)
        if dump_dir:
            stem = os.path.join(dump_dir, f"{_safe_id(entry.image_id)}_{source}")
            dump_curve(roc_points_judd(sal, truth), stem + "_roc.csv")
            dump_curve(pr_points(sal, truth), stem + "_pr.csv")
        return ("ok", record)
    except DegenerateMask as exc:
        return ("skip", entry.image_id, source, str(exc))
    except SaliencyEvalError as exc:
        return ("fail", entry.image_id, source, str(exc))


def cmd_eval(args):
    try:
        rows = ingest.load_manifest(args.manifest)
        entries = ingest.build_entries(rows)
    except SaliencyEvalError as exc:
        log.error("fatal: %s", exc)
        return 2

    sources = args.sources
    dump_dir = None
    if args.dump_curves:
        dump_dir = os.path.join(args.out, "curves")
        os.makedirs(dump_dir, exist_ok=True)

    tasks = [(entry, source, dump_dir) for entry in entries for source in sources]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_eval_task, tasks))
    else:
        results = [_eval_task(t) for t in tasks]

    records = []
    skipped = {s: 0 for s in sources}
    skipped_ids = {s: [] for s in sources}
    failures = []
    for res in results:
        if res[0] == "ok":
            records.append(res[1])
        elif res[0] == "skip":
            _, image_id, source, reason = res
            skipped[source] += 1
            skipped_ids[source].append(image_id)
            log.info("skip %s [%s]: %s", image_id, source, reason)
        else:
            _, image_id, source, reason = res
            failures.append((image_id, source, reason))
            log.error("fail %s [%s]: %s", image_id, source, reason)

    records.sort(key=lambda r: (r.image_id, r.mask_source))
    summary = report.aggregate(records, skipped=skipped)
    comparison = None
    if sum(1 for s in summary.values() if s.evaluated > 0) >= 2:
        comparison = report.compare_sources(summary, records)
    histograms = [
        report.histogram(records, metric, source, bins=args.bins)
        for metric in report.METRIC_FIELDS
        for source in sources
    ]
    # worker count is omitted: outputs must be byte-identical across pools
    config = {
        "manifest": args.manifest,
        "sources": list(sources),
        "bins": args.bins,
        "dump_curves": args.dump_curves,
    }
    report.emit_report(
        summary,
        records,
        histograms,
        args.out,
        config=config,
        comparison=comparison,
        skipped_ids=skipped_ids,
        svg=args.svg,
    )
    if failures:
        log.error("%d evaluation failure(s)", len(failures))
        return 1
    return 0


def cmd_rasterize(args):
    try:
        entries = ingest.load_annotations(args.annotations)
    except SaliencyEvalError as exc:
        log.error("fatal: %s", exc)
        return 2
    os.makedirs(args.out, exist_ok=True)
    written = 0
    for entry in entries:
        boxes = entry.infected_boxes
        if not boxes:
            log.info("skip %s: no infected annotations", entry.image_id)
            continue
        mask = union_masks([rasterize_box(b, entry.width, entry.height) for b in boxes])
        ingest.save_mask(mask, os.path.join(args.out, _safe_id(entry.image_id) + ".png"))
        written += 1
    log.info("wrote %d mask(s) to %s", written, args.out)
    return 0


def _preprocess_one(img, args):
    if args.method == "range_morph":
        mask = preprocess.color_range_mask(img, args.lower, args.upper)
        mask = preprocess.morph_refine(mask, args.kernel, args.fill_holes)
        masked = img * mask[:, :, None]
        return preprocess.linear_contrast(masked, args.alpha, args.beta)
    if args.method == "clahe":
        return preprocess.clahe_l(img, args.tiles_x, args.tiles_y, args.clip_limit)
    # clahe_blend
    enhanced = preprocess.clahe_l(img, args.tiles_x, args.tiles_y, args.clip_limit)
    blended = preprocess.weighted_blend(img, enhanced, args.weight)
    return preprocess.linear_contrast(blended, args.alpha, args.beta)


def cmd_preprocess(args):
    names = sorted(n for n in os.listdir(args.in_dir) if n.lower().endswith(".png"))
    if not names:
        log.error("no PNG images in %s", args.in_dir)
        return 2
    os.makedirs(args.out_dir, exist_ok=True)
    failures = 0
    for name in names:
        src = os.path.join(args.in_dir, name)
        try:
            img = np.asarray(Image.open(src).convert("RGB"))
            out = _preprocess_one(img, args)
            Image.fromarray(out, mode="RGB").save(os.path.join(args.out_dir, name))
        except (OSError, SaliencyEvalError) as exc:
            failures += 1
            log.error("fail %s: %s", src, exc)
    return 1 if failures else 0


def _channel_triple(text):
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated channel values")
    return tuple(parts)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="saliency-eval",
        description="Score saliency-map localization against box or segmentation "
        "ground truth and aggregate the results.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a manifest and write a report")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--out", required=True, help="report output directory")
    p_eval.add_argument(
        "--sources",
        nargs="+",
        choices=MASK_SOURCES,
        default=[ANNOTATION_BOX, EXTERNAL_MASK],
        help="mask sources to evaluate",
    )
    p_eval.add_argument("--bins", type=int, default=20, help="histogram bins")
    p_eval.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p_eval.add_argument("--dump-curves", action="store_true",
                        help="write per-image ROC/PR curve CSVs")
    p_eval.add_argument("--svg", action="store_true", help="write SVG bar charts")
    p_eval.set_defaults(func=cmd_eval)

    p_rast = sub.add_parser("rasterize", help="write union masks of infected boxes")
    p_rast.add_argument("--annotations", required=True)
    p_rast.add_argument("--out", required=True)
    p_rast.set_defaults(func=cmd_rasterize)

    p_pre = sub.add_parser("preprocess", help="run an enhancement pipeline over a directory")
    p_pre.add_argument("--in-dir", required=True)
    p_pre.add_argument("--out-dir", required=True)
    p_pre.add_argument("--method", required=True,
                       choices=["range_morph", "clahe", "clahe_blend"])
    p_pre.add_argument("--tiles-x", type=int, default=8)
    p_pre.add_argument("--tiles-y", type=int, default=8)
    p_pre.add_argument("--clip-limit", type=float, default=2.0)
    p_pre.add_argument("--kernel", type=int, default=3)
    p_pre.add_argument("--fill-holes", action="store_true")
    p_pre.add_argument("--alpha", type=float, default=1.0)
    p_pre.add_argument("--beta", type=float, default=0.0)
    p_pre.add_argument("--weight", type=float, default=0.5, help="blend weight")
    p_pre.add_argument("--lower", type=_channel_triple, default=(0, 0, 0))
    p_pre.add_argument("--upper", type=_channel_triple, default=(255, 255, 255))
    p_pre.set_defaults(func=cmd_preprocess)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
