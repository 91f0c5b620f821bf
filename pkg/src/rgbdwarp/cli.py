"""Command-line surface: reproject, gen paired|unpaired, eval, fill.

Exit codes: 0 success, 1 runtime failure, 2 usage error. Every subcommand
prints one machine-readable JSON object to stdout; diagnostics go to
stderr. Infinite metric values serialize as the string "inf".
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import imgio
from .dataset import (
    IngestConfig,
    PerturbationRanges,
    gen_paired,
    gen_unpaired,
    load_sequence,
    parse_intrinsics,
    pose_from_raw34,
    write_manifest,
)
from .errors import RgbdWarpError
from .geometry import invert
from .inpaint import FILL_METHODS, fill_holes
from .metrics import coverage, psnr, ssim
from .pointcloud import RgbdFrame
from .render import MAX_SPLAT_RADIUS, RenderConfig, reproject

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _radius(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SPLAT_RADIUS:
        raise argparse.ArgumentTypeError(
            f"must be in [0, {MAX_SPLAT_RADIUS}], got {value}"
        )
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _json_value(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _parse_pose_arg(args):
    if args.pose is not None:
        tokens = args.pose.split()
    else:
        tokens = Path(args.pose_file).read_text().split()
    try:
        values = [float(t) for t in tokens]
    except ValueError:
        raise RgbdWarpError(f"pose must be 12 numbers, got {tokens!r}") from None
    return pose_from_raw34(values, "--pose")


def _cmd_reproject(args) -> int:
    color = imgio.load_color(args.color)
    depth = imgio.load_depth(args.depth, args.depth_encoding)
    h, w = color.shape[:2]
    k = parse_intrinsics(args.intrinsics, w, h)
    pose = _parse_pose_arg(args)
    frame = RgbdFrame(color, depth, k)
    cfg = RenderConfig(splat_radius=args.splat_radius)
    # --pose gives the target camera's pose relative to the source camera,
    # so points move into the target frame by its inverse
    result = reproject(frame, k, invert(pose), cfg)

    out_dir = Path(args.out)
    imgio.save_color(result.color, out_dir / "color.png")
    imgio.save_mask(result.mask, out_dir / "mask.png")
    imgio.save_depth_mm(np.where(result.mask, result.zbuffer, 0.0), out_dir / "depth.png")

    stats = result.stats
    print(json.dumps({
        "points_total": stats.points_total,
        "points_behind": stats.points_behind,
        "points_clipped": stats.points_clipped,
        "points_drawn": stats.points_drawn,
        "coverage": coverage(result.mask),
        "out": str(out_dir),
    }))
    return 0


def _cmd_gen_paired(args) -> int:
    cfg = RenderConfig(splat_radius=args.splat_radius)
    ingest = IngestConfig(depth_encoding=args.depth_encoding)
    out = Path(args.out)
    records = []
    requested = 0
    for seq_dir in args.seq:
        seq = load_sequence(seq_dir, ingest)
        requested += args.pairs_per_seq
        records.extend(
            gen_paired(
                seq, out, args.pairs_per_seq,
                max_gap=args.max_gap, seed=args.seed, cfg=cfg, threads=args.threads,
            )
        )
    write_manifest(records, out / "manifest.jsonl")
    print(json.dumps({
        "mode": "paired",
        "records": len(records),
        "requested": requested,
        "out": str(out),
    }))
    return 0


def _cmd_gen_unpaired(args) -> int:
    cfg = RenderConfig(splat_radius=args.splat_radius)
    ingest = IngestConfig(depth_encoding=args.depth_encoding)
    ranges = PerturbationRanges(
        yaw_deg=args.rot_deg, pitch_deg=args.rot_deg, roll_deg=args.rot_deg,
        tx_m=args.trans_m, ty_m=args.trans_m, tz_m=args.trans_m,
    )
    sequences = [load_sequence(d, ingest) for d in args.seq]
    out = Path(args.out)
    records = gen_unpaired(
        sequences, out, args.count,
        ranges=ranges, seed=args.seed, cfg=cfg, threads=args.threads,
    )
    write_manifest(records, out / "manifest.jsonl")
    print(json.dumps({"mode": "unpaired", "records": len(records), "out": str(out)}))
    return 0


def _list_images(directory: Path) -> dict:
    if not directory.is_dir():
        raise RgbdWarpError(f"{directory} is not a directory")
    return {
        p.name: p
        for p in sorted(directory.iterdir())
        if p.suffix.lower() in IMAGE_SUFFIXES
    }


def _cmd_eval(args) -> int:
    pred = _list_images(Path(args.pred))
    truth = _list_images(Path(args.truth))
    unmatched = sorted(set(pred) ^ set(truth))
    if unmatched:
        for name in unmatched:
            log.error("unmatched image name: %s", name)
        raise RgbdWarpError(f"{len(unmatched)} image names do not match between directories")
    names = sorted(pred)
    if not names:
        raise RgbdWarpError("no image pairs to compare")

    mask_dir = Path(args.mask) if args.mask else None
    items = []
    for name in names:
        a = imgio.load_color(pred[name])
        b = imgio.load_color(truth[name])
        item = {"name": name, "psnr": psnr(a, b), "ssim": ssim(a, b)}
        if mask_dir is not None:
            mask_path = mask_dir / name
            if not mask_path.is_file():
                raise RgbdWarpError(f"missing mask for {name}")
            mask = imgio.load_mask(mask_path)
            holes = ~mask
            item["coverage"] = coverage(mask)
            item["psnr_holes_only"] = psnr(a, b, holes) if holes.any() else None
        items.append(item)

    aggregate = {"count": len(items)}
    for key in ("psnr", "psnr_holes_only", "ssim", "coverage"):
        values = [it[key] for it in items if it.get(key) is not None]
        if values:
            aggregate[f"{key}_mean"] = _json_value(float(np.mean(values)))

    report = {
        "items": [{k: _json_value(v) for k, v in it.items()} for it in items],
        "aggregate": aggregate,
    }
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(aggregate))
    return 0


def _cmd_fill(args) -> int:
    color = imgio.load_color(args.color)
    mask = imgio.load_mask(args.mask)
    filled = fill_holes(color, mask, args.method)
    imgio.save_color(filled, args.out)
    print(json.dumps({
        "out": str(args.out),
        "method": args.method,
        "filled_pixels": int((~mask).sum()),
    }))
    return 0


def _add_common_gen_args(p) -> None:
    p.add_argument("--seq", action="append", required=True, metavar="DIR",
                   help="sequence directory; repeat for multiple sequences")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--seed", type=int, default=0, help="generation seed")
    p.add_argument("--splat-radius", type=_radius, default=1)
    p.add_argument("--threads", type=_positive_int,
                   default=max(1, min(8, os.cpu_count() or 1)),
                   help="worker threads for rendering")
    p.add_argument("--depth-encoding", choices=imgio.DEPTH_ENCODINGS,
                   default="millimeters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgbdwarp",
        description="Re-render RGBD frames from new viewpoints and build "
                    "image-translation datasets from the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("reproject", help="re-render one RGBD frame from a new camera pose")
    sp.add_argument("--color", required=True, help="color image path")
    sp.add_argument("--depth", required=True, help="16-bit depth image path")
    sp.add_argument("--intrinsics", required=True, help="3x3 intrinsics text file")
    pose_group = sp.add_mutually_exclusive_group(required=True)
    pose_group.add_argument("--pose", help="12 numbers: 3x4 row-major camera-to-world "
                                           "pose of the target camera relative to the source")
    pose_group.add_argument("--pose-file", help="file containing the same 12 numbers")
    sp.add_argument("--splat-radius", type=_radius, default=1)
    sp.add_argument("--depth-encoding", choices=imgio.DEPTH_ENCODINGS, default="millimeters")
    sp.add_argument("--out", default="reprojected", help="output directory")
    sp.set_defaults(func=_cmd_reproject)

    gen = sub.add_parser("gen", help="generate training datasets from sequences")
    gen_sub = gen.add_subparsers(dest="gen_mode", required=True)

    gp = gen_sub.add_parser("paired", help="pose-supervised pairs from real frame pairs")
    _add_common_gen_args(gp)
    gp.add_argument("--pairs-per-seq", type=_positive_int, required=True)
    gp.add_argument("--max-gap", type=_positive_int, default=10,
                    help="largest allowed target-source frame index gap")
    gp.set_defaults(func=_cmd_gen_paired)

    gu = gen_sub.add_parser("unpaired", help="virtual-perturbation renders of single frames")
    _add_common_gen_args(gu)
    gu.add_argument("--count", type=_positive_int, required=True,
                    help="total items across all sequences")
    gu.add_argument("--rot-deg", type=_nonneg_float, default=15.0,
                    help="half-range for yaw/pitch/roll, degrees")
    gu.add_argument("--trans-m", type=_nonneg_float, default=0.2,
                    help="half-range for each translation axis, meters")
    gu.set_defaults(func=_cmd_gen_unpaired)

    ev = sub.add_parser("eval", help="PSNR/SSIM between matching images of two directories")
    ev.add_argument("--pred", required=True, help="predicted/reconstructed images")
    ev.add_argument("--truth", required=True, help="ground-truth images")
    ev.add_argument("--mask", help="mask directory for hole-only PSNR")
    ev.add_argument("--out", required=True, help="JSON report path")
    ev.set_defaults(func=_cmd_eval)

    fl = sub.add_parser("fill", help="fill mask holes in an image")
    fl.add_argument("--color", required=True)
    fl.add_argument("--mask", required=True)
    fl.add_argument("--method", choices=FILL_METHODS, default="nearest")
    fl.add_argument("--out", required=True)
    fl.set_defaults(func=_cmd_fill)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (RgbdWarpError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
