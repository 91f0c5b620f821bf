"""RGBD sequence ingestion and paired/unpaired dataset generation.

On-disk sequence layout:

    <seq>/color/*.png|jpg    registered color frames
    <seq>/depth/*.png        16-bit depth frames, one per color frame
    <seq>/intrinsics.txt     3x3 whitespace-separated pinhole matrix
    <seq>/extrinsics.txt     one 3x4 row-major camera-to-world matrix per
                             frame, 12 numbers each

Generated dataset layout:

    <out>/source/<id>.png    re-projected (artifact-laden) images
    <out>/target/<id>.png    real photographs
    <out>/mask/<id>.png      validity masks, 255 = covered, 0 = hole
    <out>/manifest.jsonl     one JSON record per item, ordinal order

Generation is deterministic for a fixed seed: every item derives its own
RNG stream by hashing (seed, scope, ordinal), so output does not depend
on worker-thread count or scheduling.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import imgio
from .errors import CalibrationError, SequenceError
from .geometry import (
    CameraIntrinsics,
    Pose,
    invert,
    relative_pose,
    rotation_x,
    rotation_y,
    rotation_z,
)
from .pointcloud import RgbdFrame
from .render import RenderConfig, reproject

log = logging.getLogger(__name__)

COLOR_SUFFIXES = (".png", ".jpg", ".jpeg")

# File-sourced rotations only need to be this close; they get snapped to the
# nearest exact rotation before Pose's strict constructor sees them.
ROTATION_FILE_TOL = 1e-3


@dataclass(frozen=True)
class IngestConfig:
    depth_encoding: str = "millimeters"

    def __post_init__(self):
        if self.depth_encoding not in imgio.DEPTH_ENCODINGS:
            raise ValueError(
                f"depth_encoding must be one of {imgio.DEPTH_ENCODINGS}, "
                f"got {self.depth_encoding!r}"
            )


@dataclass
class FrameRef:
    """Lazy handle to one frame of a sequence; images load on demand."""

    index: int
    color_path: Path
    depth_path: Path
    pose: Pose


@dataclass
class Sequence:
    id: str
    intrinsics: CameraIntrinsics
    frames: list
    ingest: IngestConfig = IngestConfig()

    def __len__(self) -> int:
        return len(self.frames)

    def load_frame(self, i: int) -> RgbdFrame:
        ref = self.frames[i]
        color = imgio.load_color(ref.color_path)
        depth = imgio.load_depth(ref.depth_path, self.ingest.depth_encoding)
        return RgbdFrame(color, depth, self.intrinsics, ref.pose, ref.index)


def _read_numbers(path: Path) -> list:
    try:
        return [float(tok) for tok in path.read_text().split()]
    except ValueError as e:
        raise CalibrationError(f"{path}: {e}") from None


def parse_intrinsics(path, width: int, height: int) -> CameraIntrinsics:
    """Read a 3x3 intrinsics text file for an image of the given size."""
    path = Path(path)
    if not path.is_file():
        raise CalibrationError(f"intrinsics file {path} does not exist")
    values = _read_numbers(path)
    if len(values) != 9:
        raise CalibrationError(f"{path}: expected 9 numbers, got {len(values)}")
    try:
        return CameraIntrinsics.from_matrix(
            np.array(values).reshape(3, 3), width, height
        )
    except ValueError as e:
        raise CalibrationError(f"{path}: {e}") from None


def pose_from_raw34(values, where: str = "pose") -> Pose:
    """Build a Pose from 12 row-major numbers sourced from text.

    The rotation block is gated at a loose tolerance, then snapped to the
    nearest exact rotation via SVD so downstream pose algebra sees a clean
    orthonormal matrix.
    """
    m = np.asarray(values, dtype=np.float64)
    if m.size != 12:
        raise CalibrationError(f"{where}: expected 12 numbers, got {m.size}")
    m = m.reshape(3, 4)
    if not np.isfinite(m).all():
        raise CalibrationError(f"{where}: non-finite values")
    r = m[:, :3]
    ortho_err = float(np.abs(r.T @ r - np.eye(3)).max())
    det = float(np.linalg.det(r))
    if ortho_err > ROTATION_FILE_TOL or abs(det - 1.0) > ROTATION_FILE_TOL:
        raise CalibrationError(
            f"{where}: rotation is not orthonormal "
            f"(max |R^T R - I| = {ortho_err:.2e}, det = {det:.6f})"
        )
    u, _, vt = np.linalg.svd(r)
    snapped = u @ vt
    if np.linalg.det(snapped) < 0:
        raise CalibrationError(f"{where}: rotation is a reflection")
    return Pose(snapped, m[:, 3])


def load_sequence(directory, ingest: IngestConfig = None, sequence_id: str = None) -> Sequence:
    """Index a sequence directory; image data stays on disk until needed."""
    if ingest is None:
        ingest = IngestConfig()
    root = Path(directory)
    if not root.is_dir():
        raise SequenceError(f"{root} is not a directory")
    color_dir = root / "color"
    depth_dir = root / "depth"
    colors = (
        sorted(p for p in color_dir.iterdir() if p.suffix.lower() in COLOR_SUFFIXES)
        if color_dir.is_dir()
        else []
    )
    depths = sorted(depth_dir.glob("*.png")) if depth_dir.is_dir() else []
    if not colors or not depths:
        raise SequenceError(f"{root} must contain color/ and depth/ image directories")
    if len(colors) != len(depths):
        raise SequenceError(
            f"{root}: {len(colors)} color frames but {len(depths)} depth frames"
        )

    with Image.open(colors[0]) as im:
        width, height = im.size
    intrinsics = parse_intrinsics(root / "intrinsics.txt", width, height)

    extr_path = root / "extrinsics.txt"
    if not extr_path.is_file():
        raise CalibrationError(f"extrinsics file {extr_path} does not exist")
    pose_values = _read_numbers(extr_path)
    if len(pose_values) != 12 * len(colors):
        raise CalibrationError(
            f"{extr_path}: expected {12 * len(colors)} numbers "
            f"(12 per frame for {len(colors)} frames), got {len(pose_values)}"
        )
    mats = np.array(pose_values).reshape(-1, 3, 4)
    frames = [
        FrameRef(i, cp, dp, pose_from_raw34(mats[i], f"{extr_path} frame {i}"))
        for i, (cp, dp) in enumerate(zip(colors, depths))
    ]
    return Sequence(sequence_id or root.name, intrinsics, frames, ingest)


@dataclass
class PairRecord:
    """One paired training item: frame A re-rendered into frame B's camera."""

    pair_id: str
    sequence_id: str
    source_frame_index: int
    target_frame_index: int
    relative_pose: Pose
    source_reprojected_image: str
    target_real_image: str
    mask_image: str
    splat_radius: int

    def to_json_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "sequence_id": self.sequence_id,
            "source_frame_index": self.source_frame_index,
            "target_frame_index": self.target_frame_index,
            "relative_pose": [float(v) for v in self.relative_pose.matrix34().ravel()],
            "source_reprojected_image": self.source_reprojected_image,
            "target_real_image": self.target_real_image,
            "mask_image": self.mask_image,
            "splat_radius": self.splat_radius,
        }


@dataclass
class UnpairedRecord:
    """One unpaired training item: a frame re-rendered under a random
    virtual camera perturbation, with the original photo as the target."""

    item_id: str
    sequence_id: str
    frame_index: int
    perturbation: Pose
    source_image: str
    target_image: str
    mask_image: str
    yaw_deg: float
    pitch_deg: float
    roll_deg: float
    tx_m: float
    ty_m: float
    tz_m: float

    def to_json_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "sequence_id": self.sequence_id,
            "frame_index": self.frame_index,
            "perturbation": [float(v) for v in self.perturbation.matrix34().ravel()],
            "source_image": self.source_image,
            "target_image": self.target_image,
            "mask_image": self.mask_image,
            "yaw_deg": self.yaw_deg,
            "pitch_deg": self.pitch_deg,
            "roll_deg": self.roll_deg,
            "tx_m": self.tx_m,
            "ty_m": self.ty_m,
            "tz_m": self.tz_m,
        }


@dataclass(frozen=True)
class PerturbationRanges:
    """Symmetric half-ranges; each component is drawn uniformly from [-x, +x]."""

    yaw_deg: float = 15.0
    pitch_deg: float = 15.0
    roll_deg: float = 15.0
    tx_m: float = 0.2
    ty_m: float = 0.2
    tz_m: float = 0.2

    def __post_init__(self):
        for name in ("yaw_deg", "pitch_deg", "roll_deg", "tx_m", "ty_m", "tz_m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} half-range must be >= 0, got {getattr(self, name)}")


def perturbation_pose(yaw_deg: float, pitch_deg: float, roll_deg: float, translation) -> Pose:
    """Camera-to-world pose of a virtual camera displaced from the frame's
    own camera; rotations apply yaw (y), then pitch (x), then roll (z)."""
    r = (
        rotation_y(math.radians(yaw_deg))
        @ rotation_x(math.radians(pitch_deg))
        @ rotation_z(math.radians(roll_deg))
    )
    return Pose(r, translation)


def _item_rng(seed: int, scope: str, ordinal: int) -> np.random.Generator:
    digest = hashlib.blake2b(
        f"{seed}|{scope}|{ordinal}".encode(), digest_size=8
    ).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))


def _run_parallel(fn, items, threads: int) -> None:
    if threads <= 1:
        for item in items:
            fn(item)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # list() drains the iterator so worker exceptions surface here
        list(pool.map(fn, items))


def _make_output_dirs(out: Path) -> None:
    for sub in ("source", "target", "mask"):
        (out / sub).mkdir(parents=True, exist_ok=True)


def gen_paired(
    seq: Sequence,
    out_dir,
    pairs_per_sequence: int,
    max_gap: int = 10,
    seed: int = 0,
    cfg: RenderConfig = None,
    threads: int = 1,
) -> list:
    """Sample (A, B) frame pairs with 1 <= B - A <= max_gap, render A into
    B's camera, and write source/target/mask images.

    Returns the emitted PairRecords in ordinal order. Pairs are distinct
    within the sequence; when the request exceeds the number of distinct
    combinations, every combination is emitted once and the shortfall is
    logged as a warning.
    """
    if cfg is None:
        cfg = RenderConfig()
    if pairs_per_sequence < 1:
        raise ValueError(f"pairs_per_sequence must be >= 1, got {pairs_per_sequence}")
    if max_gap < 1:
        raise ValueError(f"max_gap must be >= 1, got {max_gap}")
    n = len(seq)
    if n < 2:
        raise SequenceError(f"sequence {seq.id!r} has {n} frames; need at least 2 to pair")

    combos = [
        (a, b)
        for a in range(n - 1)
        for b in range(a + 1, min(a + max_gap, n - 1) + 1)
    ]
    if pairs_per_sequence >= len(combos):
        pairs = list(combos)
        if pairs_per_sequence > len(combos):
            log.warning(
                "sequence %s: requested %d pairs but only %d distinct (A, B) "
                "combinations exist; emitting all of them",
                seq.id, pairs_per_sequence, len(combos),
            )
    else:
        taken = set()
        pairs = []
        for ordinal in range(pairs_per_sequence):
            rng = _item_rng(seed, seq.id, ordinal)
            pick = None
            for _ in range(1000):
                a = int(rng.integers(0, n - 1))
                b = a + 1 + int(rng.integers(0, min(max_gap, n - 1 - a)))
                if (a, b) not in taken:
                    pick = (a, b)
                    break
            if pick is None:
                pick = next(c for c in combos if c not in taken)
            taken.add(pick)
            pairs.append(pick)

    records = []
    for a, b in pairs:
        rel = relative_pose(seq.frames[a].pose, seq.frames[b].pose)
        pid = f"{seq.id}_{a:05d}_{b:05d}"
        records.append(
            PairRecord(
                pair_id=pid,
                sequence_id=seq.id,
                source_frame_index=a,
                target_frame_index=b,
                relative_pose=rel,
                source_reprojected_image=f"source/{pid}.png",
                target_real_image=f"target/{pid}.png",
                mask_image=f"mask/{pid}.png",
                splat_radius=int(cfg.splat_radius),
            )
        )

    out = Path(out_dir)
    _make_output_dirs(out)

    def _emit(rec: PairRecord) -> None:
        src = seq.load_frame(rec.source_frame_index)
        target_color = imgio.load_color(seq.frames[rec.target_frame_index].color_path)
        result = reproject(src, seq.intrinsics, rec.relative_pose, cfg)
        imgio.save_color(result.color, out / rec.source_reprojected_image)
        imgio.save_color(target_color, out / rec.target_real_image)
        imgio.save_mask(result.mask, out / rec.mask_image)

    _run_parallel(_emit, records, threads)
    return records


def gen_unpaired(
    sequences,
    out_dir,
    total_items: int,
    ranges: PerturbationRanges = None,
    seed: int = 0,
    cfg: RenderConfig = None,
    threads: int = 1,
) -> list:
    """Render random frames under random virtual-camera perturbations.

    Each item picks a frame uniformly across all sequences, draws the six
    perturbation components uniformly from the given half-ranges, and
    writes a (source render, target photo, mask) triple.
    """
    if cfg is None:
        cfg = RenderConfig()
    if ranges is None:
        ranges = PerturbationRanges()
    if total_items < 1:
        raise ValueError(f"total_items must be >= 1, got {total_items}")
    sequences = list(sequences)
    frame_index = [
        (si, fi) for si, s in enumerate(sequences) for fi in range(len(s))
    ]
    if not frame_index:
        raise SequenceError("no frames available across the given sequences")

    tasks = []
    for ordinal in range(total_items):
        rng = _item_rng(seed, "unpaired", ordinal)
        si, fi = frame_index[int(rng.integers(0, len(frame_index)))]
        yaw = float(rng.uniform(-ranges.yaw_deg, ranges.yaw_deg))
        pitch = float(rng.uniform(-ranges.pitch_deg, ranges.pitch_deg))
        roll = float(rng.uniform(-ranges.roll_deg, ranges.roll_deg))
        tx = float(rng.uniform(-ranges.tx_m, ranges.tx_m))
        ty = float(rng.uniform(-ranges.ty_m, ranges.ty_m))
        tz = float(rng.uniform(-ranges.tz_m, ranges.tz_m))
        item_id = f"u{ordinal:06d}"
        rec = UnpairedRecord(
            item_id=item_id,
            sequence_id=sequences[si].id,
            frame_index=fi,
            perturbation=perturbation_pose(yaw, pitch, roll, (tx, ty, tz)),
            source_image=f"source/{item_id}.png",
            target_image=f"target/{item_id}.png",
            mask_image=f"mask/{item_id}.png",
            yaw_deg=yaw,
            pitch_deg=pitch,
            roll_deg=roll,
            tx_m=tx,
            ty_m=ty,
            tz_m=tz,
        )
        tasks.append((rec, si))

    out = Path(out_dir)
    _make_output_dirs(out)

    def _emit(task) -> None:
        rec, si = task
        s = sequences[si]
        frame = s.load_frame(rec.frame_index)
        # the virtual camera sits at `perturbation` relative to the frame's
        # camera, so points move by the inverse
        result = reproject(frame, s.intrinsics, invert(rec.perturbation), cfg)
        imgio.save_color(result.color, out / rec.source_image)
        imgio.save_color(frame.color, out / rec.target_image)
        imgio.save_mask(result.mask, out / rec.mask_image)

    _run_parallel(_emit, tasks, threads)
    return [rec for rec, _ in tasks]


def write_manifest(records, path) -> None:
    """Write records as UTF-8 JSON Lines in the order given."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec.to_json_dict()) + "\n")


def read_manifest(path) -> list:
    """Read a JSON Lines manifest back as a list of dicts."""
    with Path(path).open(encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
