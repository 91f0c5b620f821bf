"""PNG/JPEG helpers: 8-bit color, 16-bit depth, binary masks."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

DEPTH_ENCODINGS = ("millimeters", "sun3d")


def load_color(path) -> np.ndarray:
    """Read any PIL-supported image as (H, W, 3) uint8 RGB."""
    with Image.open(path) as img:
        return np.array(img.convert("RGB"))


def save_color(image: np.ndarray, path) -> None:
    arr = np.ascontiguousarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.dtype != np.uint8:
        raise ValueError(f"expected (H, W, 3) uint8 image, got {arr.shape} {arr.dtype}")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr, mode="RGB").save(path)


def decode_depth(raw, encoding: str = "millimeters") -> np.ndarray:
    """Convert 16-bit raw depth to meters; raw 0 stays 0 and means invalid.

    "millimeters" divides by 1000. "sun3d" first undoes the 3-bit left
    rotation those files carry (16-bit right-rotate by 3), then divides.
    """
    raw = np.asarray(raw).astype(np.uint16)
    if encoding == "millimeters":
        mm = raw.astype(np.float64)
    elif encoding == "sun3d":
        rotated = (raw >> np.uint16(3)) | ((raw & np.uint16(0x7)) << np.uint16(13))
        mm = rotated.astype(np.float64)
    else:
        raise ValueError(f"unknown depth encoding {encoding!r}, expected one of {DEPTH_ENCODINGS}")
    return mm / 1000.0


def load_depth(path, encoding: str = "millimeters") -> np.ndarray:
    """Read a 16-bit depth PNG as (H, W) float64 meters."""
    with Image.open(path) as img:
        raw = np.array(img)
    if raw.ndim != 2:
        raise ValueError(f"depth image must be single-channel, got shape {raw.shape}")
    return decode_depth(raw, encoding)


def save_depth_mm(depth_m, path) -> None:
    """Store meters as 16-bit millimeter PNG; non-finite or negative -> 0."""
    d = np.asarray(depth_m, dtype=np.float64)
    mm = np.where(np.isfinite(d), np.rint(d * 1000.0), 0.0)
    mm = np.clip(mm, 0.0, 65535.0).astype(np.uint16)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(mm).save(path)


def load_mask(path) -> np.ndarray:
    """Read a mask image as (H, W) bool; any nonzero pixel counts as valid."""
    with Image.open(path) as img:
        return np.array(img.convert("L")) > 0


def save_mask(mask, path) -> None:
    """Write a boolean mask as 8-bit PNG, 255 = valid, 0 = hole."""
    arr = np.asarray(mask).astype(np.uint8) * np.uint8(255)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr, mode="L").save(path)
