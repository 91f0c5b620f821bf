"""Colored point clouds built from registered RGBD frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import CameraIntrinsics, Pose


@dataclass
class RgbdFrame:
    """One registered color + depth capture.

    color is (H, W, 3) uint8; depth is (H, W) float64 meters with 0 marking
    invalid pixels. The pose is camera-to-world.
    """

    color: np.ndarray
    depth: np.ndarray
    intrinsics: CameraIntrinsics
    pose: Pose = field(default_factory=Pose.identity)
    frame_index: int = 0
    timestamp: Optional[float] = None

    def __post_init__(self):
        self.color = np.ascontiguousarray(self.color)
        self.depth = np.asarray(self.depth, dtype=np.float64)
        if self.color.ndim != 3 or self.color.shape[2] != 3 or self.color.dtype != np.uint8:
            raise ValueError(
                f"color must be (H, W, 3) uint8, got shape {self.color.shape} "
                f"dtype {self.color.dtype}"
            )
        h, w = self.color.shape[:2]
        if self.depth.shape != (h, w):
            raise ValueError(f"depth shape {self.depth.shape} does not match color {(h, w)}")
        if not np.isfinite(self.depth).all() or bool((self.depth < 0).any()):
            raise ValueError("depth values must be finite and >= 0")
        if (self.intrinsics.width, self.intrinsics.height) != (w, h):
            raise ValueError(
                f"intrinsics are {self.intrinsics.width}x{self.intrinsics.height} "
                f"but images are {w}x{h}"
            )

    @property
    def valid_mask(self) -> np.ndarray:
        return self.depth > 0


@dataclass
class ColoredPointCloud:
    """Structure-of-arrays cloud: positions (N, 3) float64 meters, colors (N, 3) uint8."""

    positions: np.ndarray
    colors: np.ndarray

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=np.float64).reshape(-1, 3)
        self.colors = np.ascontiguousarray(self.colors, dtype=np.uint8).reshape(-1, 3)
        if len(self.positions) != len(self.colors):
            raise ValueError(
                f"{len(self.positions)} positions but {len(self.colors)} colors"
            )

    def __len__(self) -> int:
        return len(self.positions)


def cloud_from_rgbd(frame: RgbdFrame) -> ColoredPointCloud:
    """Unproject every valid-depth pixel into the camera frame.

    Points come out in row-major pixel order, which downstream code relies
    on for deterministic tie-breaking.
    """
    k = frame.intrinsics
    vs, us = np.nonzero(frame.depth > 0)
    z = frame.depth[vs, us]
    x = (us - k.cx) * z / k.fx
    y = (vs - k.cy) * z / k.fy
    return ColoredPointCloud(np.stack([x, y, z], axis=1), frame.color[vs, us])


def transform_cloud(cloud: ColoredPointCloud, t: Pose) -> ColoredPointCloud:
    return ColoredPointCloud(t.apply(cloud.positions), cloud.colors)


def save_ply(cloud: ColoredPointCloud, path) -> None:
    """Write the cloud as ASCII PLY with float positions and uchar colors."""
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(cloud)}",
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "end_header",
    ]
    for p, c in zip(cloud.positions, cloud.colors):
        lines.append(f"{p[0]:.6g} {p[1]:.6g} {p[2]:.6g} {c[0]} {c[1]} {c[2]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
