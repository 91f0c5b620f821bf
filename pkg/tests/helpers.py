"""Shared fixture builders: synthetic frames and on-disk sequences."""

import math
from pathlib import Path

import numpy as np

from rgbdwarp import CameraIntrinsics, Pose, RgbdFrame, imgio, rotation_y


def make_frame(width=64, height=48, seed=0, invalid_frac=0.1,
               depth_range=(0.5, 4.0), fx=None, fy=None) -> RgbdFrame:
    """Random frame: colors in 1..255 so the (0, 0, 0) hole sentinel is
    detectable, depths quantized to whole millimeters."""
    rng = np.random.default_rng(seed)
    color = rng.integers(1, 256, (height, width, 3), dtype=np.uint8)
    depth = rng.integers(
        int(depth_range[0] * 1000), int(depth_range[1] * 1000), (height, width)
    ).astype(np.float64) / 1000.0
    if invalid_frac > 0:
        depth[rng.random((height, width)) < invalid_frac] = 0.0
    k = CameraIntrinsics(
        fx or 0.8 * width, fy or 0.8 * width, width / 2.0, height / 2.0, width, height
    )
    return RgbdFrame(color, depth, k)


def write_sequence(root, n_frames=8, width=48, height=36, seed=0,
                   step=(0.03, 0.0, 0.0), yaw_step_deg=0.0, plane_z=2.0,
                   texel_m=0.15, invalid_frac=0.0):
    """Write a geometrically consistent sequence: a textured plane at
    world z = plane_z viewed by a camera that translates by `step` and
    yaws by `yaw_step_deg` per frame. Returns (intrinsics, poses)."""
    root = Path(root)
    (root / "color").mkdir(parents=True)
    (root / "depth").mkdir()
    fx = fy = 0.9 * width
    cx, cy = width / 2.0, height / 2.0
    k = CameraIntrinsics(fx, fy, cx, cy, width, height)
    (root / "intrinsics.txt").write_text(f"{fx} 0 {cx}\n0 {fy} {cy}\n0 0 1\n")

    rng = np.random.default_rng(seed)
    tex = rng.integers(1, 256, (257, 263, 3), dtype=np.uint8)

    poses = [
        Pose(rotation_y(math.radians(yaw_step_deg * i)),
             np.asarray(step, dtype=np.float64) * i)
        for i in range(n_frames)
    ]

    us, vs = np.meshgrid(np.arange(width), np.arange(height))
    dir_cam = np.stack(
        [(us - cx) / fx, (vs - cy) / fy, np.ones((height, width))], axis=-1
    )
    lines = []
    for i, pose in enumerate(poses):
        dir_world = dir_cam @ pose.rotation.T
        s = (plane_z - pose.translation[2]) / dir_world[..., 2]
        px = pose.translation[0] + s * dir_world[..., 0]
        py = pose.translation[1] + s * dir_world[..., 1]
        ix = np.floor(px / texel_m).astype(np.int64) % tex.shape[1]
        iy = np.floor(py / texel_m).astype(np.int64) % tex.shape[0]
        depth = s.copy()
        if invalid_frac > 0:
            depth[rng.random((height, width)) < invalid_frac] = 0.0
        imgio.save_color(tex[iy, ix], root / "color" / f"{i:04d}.png")
        imgio.save_depth_mm(depth, root / "depth" / f"{i:04d}.png")
        lines.append(" ".join(f"{v:.17g}" for v in pose.matrix34().ravel()))
    (root / "extrinsics.txt").write_text("\n".join(lines) + "\n")
    return k, poses


def tree_digest(root) -> dict:
    """Map of relative path -> file bytes for comparing output trees."""
    root = Path(root)
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }
