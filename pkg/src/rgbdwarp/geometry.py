"""Pinhole camera model and SE(3) rigid-transform algebra.

Conventions used throughout the package:

- camera frame is right-handed with +x right, +y down, +z forward, so the
  camera looks along +z;
- integer pixel (u, v) addresses the center of that pixel, no half-pixel
  offset is applied anywhere;
- poses are camera-to-world: p_world = R @ p_cam + t, so the identity pose
  places the camera at the world origin looking along world +z.

All math runs in 64-bit floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BehindCameraError, InvalidDepthError, PixelBoundsError

# Constructor-level gate; inputs from files pass through a looser gate plus
# re-orthonormalization in the dataset loader before they reach Pose.
ROTATION_TOL = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters; focal lengths and principal point in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx} fy={self.fy}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image size must be at least 1x1, got {self.width}x{self.height}")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError(
                f"principal point ({self.cx}, {self.cy}) outside {self.width}x{self.height} image"
            )

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]],
            dtype=np.float64,
        )

    @classmethod
    def from_matrix(cls, k, width: int, height: int) -> "CameraIntrinsics":
        k = np.asarray(k, dtype=np.float64)
        if k.shape != (3, 3):
            raise ValueError(f"intrinsic matrix must be 3x3, got shape {k.shape}")
        return cls(
            float(k[0, 0]), float(k[1, 1]), float(k[0, 2]), float(k[1, 2]),
            int(width), int(height),
        )


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid camera-to-world transform: p_world = rotation @ p_cam + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.array(self.rotation, dtype=np.float64)
        t = np.array(self.translation, dtype=np.float64).reshape(3)
        if r.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got shape {r.shape}")
        if not np.isfinite(r).all():
            raise ValueError("rotation has non-finite entries")
        ortho_err = float(np.abs(r.T @ r - np.eye(3)).max())
        if ortho_err > ROTATION_TOL:
            raise ValueError(f"rotation is not orthonormal (max |R^T R - I| = {ortho_err:.3e})")
        det = float(np.linalg.det(r))
        if abs(det - 1.0) > ROTATION_TOL:
            raise ValueError(f"rotation determinant {det:.12f} != 1 (reflection or scale)")
        if not np.isfinite(t).all():
            raise ValueError("translation has non-finite components")
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix34(cls, m) -> "Pose":
        m = np.asarray(m, dtype=np.float64).reshape(3, 4)
        return cls(m[:, :3], m[:, 3])

    def matrix34(self) -> np.ndarray:
        return np.hstack([self.rotation, self.translation[:, None]])

    def apply(self, points) -> np.ndarray:
        """Transform a 3-vector or an (N, 3) array of points."""
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation


def unproject(u: float, v: float, depth: float, k: CameraIntrinsics) -> np.ndarray:
    """Lift pixel (u, v) with depth in meters to a camera-frame 3D point."""
    if not (math.isfinite(depth) and depth > 0):
        raise InvalidDepthError(f"depth must be positive and finite, got {depth}")
    if not (0 <= u < k.width and 0 <= v < k.height):
        raise PixelBoundsError(f"pixel ({u}, {v}) outside {k.width}x{k.height} image")
    return np.array([(u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth])


def project(p, k: CameraIntrinsics) -> tuple:
    """Project a camera-frame point to continuous pixel coordinates.

    The result may land outside the image rectangle; clipping is the
    caller's job.
    """
    x, y, z = float(p[0]), float(p[1]), float(p[2])
    if not z > 0:
        raise BehindCameraError(f"point z={z} is not in front of the camera")
    return k.fx * x / z + k.cx, k.fy * y / z + k.cy


def project_points(points: np.ndarray, k: CameraIntrinsics) -> np.ndarray:
    """Vectorized pinhole projection of (N, 3) points; performs no z checks."""
    pts = np.asarray(points, dtype=np.float64)
    z = pts[:, 2]
    return np.stack([k.fx * pts[:, 0] / z + k.cx, k.fy * pts[:, 1] / z + k.cy], axis=1)


def compose(a: Pose, b: Pose) -> Pose:
    """Pose that applies b first, then a."""
    return Pose(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


def invert(t: Pose) -> Pose:
    rt = t.rotation.T
    return Pose(rt, -(rt @ t.translation))


def relative_pose(source: Pose, target: Pose) -> Pose:
    """Transform mapping source-camera coordinates into target-camera coordinates."""
    return compose(invert(target), source)


def rotation_x(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_y(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_z(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
