"""Z-buffered point-splat rasterization into a pinhole camera."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import CameraIntrinsics, Pose
from .pointcloud import ColoredPointCloud, RgbdFrame, cloud_from_rgbd, transform_cloud

MAX_SPLAT_RADIUS = 16


@dataclass(frozen=True)
class RenderConfig:
    """Rasterization knobs.

    Each point covers the (2r + 1)^2 pixel square centered on its rounded
    projection, r = splat_radius. depth_epsilon documents the granularity
    of the order-independence guarantee; the winner test itself is an exact
    strictly-nearer comparison, with exact depth ties going to the
    lowest-index point.
    """

    splat_radius: int = 1
    hole_color: tuple = (0, 0, 0)
    depth_epsilon: float = 1e-9

    def __post_init__(self):
        if not (0 <= int(self.splat_radius) <= MAX_SPLAT_RADIUS):
            raise ValueError(
                f"splat_radius must be in [0, {MAX_SPLAT_RADIUS}], got {self.splat_radius}"
            )
        if len(self.hole_color) != 3 or not all(
            isinstance(c, int) and 0 <= c <= 255 for c in self.hole_color
        ):
            raise ValueError(f"hole_color must be three 0..255 integers, got {self.hole_color}")
        if not self.depth_epsilon > 0:
            raise ValueError(f"depth_epsilon must be positive, got {self.depth_epsilon}")


@dataclass(frozen=True)
class RenderStats:
    """Point accounting; points_total = points_behind + points_clipped + points_drawn.

    points_drawn counts points whose splat square overlapped the image,
    whether or not they won the depth test anywhere.
    """

    points_total: int
    points_behind: int
    points_clipped: int
    points_drawn: int


@dataclass
class RenderOutput:
    """color (H, W, 3) uint8; mask (H, W) bool, True where a point landed;
    zbuffer (H, W) float64 camera-z meters, +inf where mask is False."""

    color: np.ndarray
    mask: np.ndarray
    zbuffer: np.ndarray
    stats: RenderStats


@njit(cache=True, nogil=True)
def _splat_kernel(pos, col, fx, fy, cx, cy, width, height, r, out, mask, zbuf):
    behind = 0
    clipped = 0
    drawn = 0
    for i in range(pos.shape[0]):
        z = pos[i, 2]
        # NaN z counts as behind; positive-form test makes that fall through
        if not (z > 0.0):
            behind += 1
            continue
        u = fx * pos[i, 0] / z + cx
        v = fy * pos[i, 1] / z + cy
        # round half away from zero
        cu = math.floor(u + 0.5) if u >= 0.0 else math.ceil(u - 0.5)
        cv = math.floor(v + 0.5) if v >= 0.0 else math.ceil(v - 0.5)
        if cu >= -r and cu <= width - 1.0 + r and cv >= -r and cv <= height - 1.0 + r:
            drawn += 1
            icu = int(cu)
            icv = int(cv)
            x0 = max(icu - r, 0)
            x1 = min(icu + r, width - 1)
            y0 = max(icv - r, 0)
            y1 = min(icv + r, height - 1)
            for y in range(y0, y1 + 1):
                for x in range(x0, x1 + 1):
                    if z < zbuf[y, x]:
                        zbuf[y, x] = z
                        out[y, x, 0] = col[i, 0]
                        out[y, x, 1] = col[i, 1]
                        out[y, x, 2] = col[i, 2]
                        mask[y, x] = 1
        else:
            clipped += 1
    return behind, clipped, drawn


def render(
    cloud: ColoredPointCloud, k: CameraIntrinsics, cfg: RenderConfig = None
) -> RenderOutput:
    """Splat a camera-frame cloud into the image plane, nearest point wins."""
    if cfg is None:
        cfg = RenderConfig()
    h, w = k.height, k.width
    color = np.empty((h, w, 3), dtype=np.uint8)
    color[:, :] = np.asarray(cfg.hole_color, dtype=np.uint8)
    mask = np.zeros((h, w), dtype=np.uint8)
    zbuf = np.full((h, w), np.inf, dtype=np.float64)
    behind, clipped, drawn = _splat_kernel(
        cloud.positions, cloud.colors,
        float(k.fx), float(k.fy), float(k.cx), float(k.cy),
        w, h, int(cfg.splat_radius),
        color, mask, zbuf,
    )
    stats = RenderStats(len(cloud), int(behind), int(clipped), int(drawn))
    return RenderOutput(color, mask.astype(bool), zbuf, stats)


def reproject(
    frame: RgbdFrame,
    target_intrinsics: CameraIntrinsics,
    t_rel: Pose,
    cfg: RenderConfig = None,
) -> RenderOutput:
    """Re-render a frame from a new viewpoint.

    t_rel maps source-camera coordinates into target-camera coordinates
    (see geometry.relative_pose).
    """
    cloud = transform_cloud(cloud_from_rgbd(frame), t_rel)
    return render(cloud, target_intrinsics, cfg)
