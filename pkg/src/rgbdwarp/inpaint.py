"""Classical hole filling for splat-rendered images.

Two methods:

- "nearest": every hole pixel copies the color of the exactly nearest
  valid pixel (Euclidean distance on the pixel grid); equidistant sources
  resolve to the first one in row-major order, which makes the output
  fully deterministic.
- "pushpull": pull-push pyramid interpolation; valid colors are averaged
  down to a 1x1 level with coverage weights, then blended back up with
  bilinear upsampling. Holes get smooth interpolated color, valid pixels
  pass through untouched.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import AllHolesError

FILL_METHODS = ("nearest", "pushpull")

_FAR = np.int64(1) << 62


@njit(cache=True, nogil=True)
def _column_nearest(valid):
    """Per pixel: squared distance to, and row of, the nearest valid pixel
    in the same column. Ties keep the smaller row. -1 row marks an entirely
    invalid column."""
    h, w = valid.shape
    dist2 = np.full((h, w), _FAR, np.int64)
    src_row = np.full((h, w), -1, np.int64)
    for x in range(w):
        last = -1
        for y in range(h):
            if valid[y, x]:
                last = y
            if last >= 0:
                d = y - last
                dist2[y, x] = d * d
                src_row[y, x] = last
        nxt = -1
        for y in range(h - 1, -1, -1):
            if valid[y, x]:
                nxt = y
            if nxt >= 0:
                d = nxt - y
                # strict < keeps the upper row on ties (row-major rule)
                if d * d < dist2[y, x]:
                    dist2[y, x] = d * d
                    src_row[y, x] = nxt
    return dist2, src_row


@njit(cache=True, nogil=True)
def _nearest_fill_kernel(color, valid, dist2, src_row, out):
    h, w = valid.shape
    for y in range(h):
        for x in range(w):
            if valid[y, x]:
                continue
            best_d2 = _FAR
            best_y = -1
            best_x = -1
            k = 0
            # scan columns outward; k*k > best_d2 prunes once a winner exists
            while k < w and k * k <= best_d2:
                i = x - k
                if i >= 0 and src_row[y, i] >= 0:
                    cd2 = k * k + dist2[y, i]
                    sy = src_row[y, i]
                    if cd2 < best_d2 or (
                        cd2 == best_d2 and (sy < best_y or (sy == best_y and i < best_x))
                    ):
                        best_d2 = cd2
                        best_y = sy
                        best_x = i
                if k > 0:
                    i = x + k
                    if i < w and src_row[y, i] >= 0:
                        cd2 = k * k + dist2[y, i]
                        sy = src_row[y, i]
                        if cd2 < best_d2 or (
                            cd2 == best_d2 and (sy < best_y or (sy == best_y and i < best_x))
                        ):
                            best_d2 = cd2
                            best_y = sy
                            best_x = i
                k += 1
            out[y, x, 0] = color[best_y, best_x, 0]
            out[y, x, 1] = color[best_y, best_x, 1]
            out[y, x, 2] = color[best_y, best_x, 2]


def _nearest_fill(color: np.ndarray, valid: np.ndarray) -> np.ndarray:
    out = color.copy()
    dist2, src_row = _column_nearest(valid)
    _nearest_fill_kernel(color, valid, dist2, src_row, out)
    return out


def _bilinear_upsample(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize (h, w) or (h, w, c) float array with bilinear interpolation;
    output pixel centers map into input coordinates, edges clamp."""
    in_h, in_w = img.shape[:2]
    ys = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0.0, in_h - 1.0)
    xs = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = ys - y0
    wx = xs - x0
    if img.ndim == 3:
        wy = wy[:, None, None]
        wx = wx[None, :, None]
    else:
        wy = wy[:, None]
        wx = wx[None, :]
    a = img[np.ix_(y0, x0)]
    b = img[np.ix_(y0, x1)]
    c = img[np.ix_(y1, x0)]
    d = img[np.ix_(y1, x1)]
    top = a * (1.0 - wx) + b * wx
    bottom = c * (1.0 - wx) + d * wx
    return top * (1.0 - wy) + bottom * wy


def _push(norm: np.ndarray, conf: np.ndarray):
    """Halve both dimensions: block-average premultiplied color and
    confidence with true block areas (edge blocks may be 2x1, 1x2 or 1x1)."""
    h, w = conf.shape
    ri = np.arange(0, h, 2)
    ci = np.arange(0, w, 2)
    premult = norm * conf[:, :, None]
    s_c = np.add.reduceat(np.add.reduceat(premult, ri, axis=0), ci, axis=1)
    s_w = np.add.reduceat(np.add.reduceat(conf, ri, axis=0), ci, axis=1)
    bh = np.minimum(ri + 2, h) - ri
    bw = np.minimum(ci + 2, w) - ci
    area = (bh[:, None] * bw[None, :]).astype(np.float64)
    denom = np.where(s_w > 0.0, s_w, 1.0)
    norm_next = np.where(s_w[:, :, None] > 0.0, s_c / denom[:, :, None], 0.0)
    conf_next = s_w / area
    return norm_next, conf_next


def _push_pull(color: np.ndarray, valid: np.ndarray) -> np.ndarray:
    norm = color.astype(np.float64) * valid[:, :, None]
    conf = valid.astype(np.float64)
    levels = [(norm, conf)]
    while levels[-1][1].shape[0] > 1 or levels[-1][1].shape[1] > 1:
        levels.append(_push(*levels[-1]))
    filled = levels[-1][0]
    for norm_k, conf_k in reversed(levels[:-1]):
        up = _bilinear_upsample(filled, norm_k.shape[0], norm_k.shape[1])
        c = conf_k[:, :, None]
        filled = c * norm_k + (1.0 - c) * up
    return filled


def fill_holes(color: np.ndarray, mask: np.ndarray, method: str = "nearest") -> np.ndarray:
    """Fill pixels where mask is False; pixels where mask is True are
    returned bit-identical. Raises AllHolesError when nothing is valid."""
    color = np.ascontiguousarray(color)
    if color.ndim != 3 or color.shape[2] != 3 or color.dtype != np.uint8:
        raise ValueError(
            f"color must be (H, W, 3) uint8, got shape {color.shape} dtype {color.dtype}"
        )
    valid = np.asarray(mask).astype(bool)
    if valid.shape != color.shape[:2]:
        raise ValueError(f"mask shape {valid.shape} does not match image {color.shape[:2]}")
    if method not in FILL_METHODS:
        raise ValueError(f"unknown fill method {method!r}, expected one of {FILL_METHODS}")
    if not valid.any():
        raise AllHolesError("mask has no valid pixels to fill from")
    if valid.all():
        return color.copy()
    if method == "nearest":
        return _nearest_fill(color, valid)
    filled = _push_pull(color, valid)
    out = color.copy()
    hole = ~valid
    out[hole] = np.clip(np.rint(filled[hole]), 0.0, 255.0).astype(np.uint8)
    return out
