"""Image fidelity metrics over 8-bit color images."""

from __future__ import annotations

import math

import numpy as np

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
SSIM_WINDOW = 8
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2


def _as_image_pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b, mask=None) -> float:
    """Peak signal-to-noise ratio in dB against a 255 peak.

    Identical inputs give +inf. With a mask, only pixels where mask is
    nonzero contribute to the mean squared error.
    """
    a, b = _as_image_pair(a, b)
    diff = a.astype(np.float64) - b.astype(np.float64)
    if mask is not None:
        sel = np.asarray(mask).astype(bool)
        if sel.shape != a.shape[:2]:
            raise ValueError(f"mask shape {sel.shape} does not match image {a.shape[:2]}")
        if not sel.any():
            raise ValueError("mask selects no pixels")
        diff = diff[sel]
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def _luma(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    return (
        img[..., 0] * LUMA_WEIGHTS[0]
        + img[..., 1] * LUMA_WEIGHTS[1]
        + img[..., 2] * LUMA_WEIGHTS[2]
    )


def _box_sums(img: np.ndarray, win: int) -> np.ndarray:
    """Sums over every win x win window at stride 1, via an integral image."""
    cs = np.cumsum(np.cumsum(img, axis=0, dtype=np.float64), axis=1)
    cs = np.pad(cs, ((1, 0), (1, 0)))
    return cs[win:, win:] - cs[:-win, win:] - cs[win:, :-win] + cs[:-win, :-win]


def ssim(a, b) -> float:
    """Mean structural similarity on luma with an 8x8 box window, stride 1.

    Uses population (biased) variance; identical inputs give exactly 1.0.
    """
    a, b = _as_image_pair(a, b)
    h, w = a.shape[:2]
    if h < SSIM_WINDOW or w < SSIM_WINDOW:
        raise ValueError(f"images must be at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {w}x{h}")
    la = _luma(a)
    lb = _luma(b)
    n = float(SSIM_WINDOW * SSIM_WINDOW)
    mu_a = _box_sums(la, SSIM_WINDOW) / n
    mu_b = _box_sums(lb, SSIM_WINDOW) / n
    var_a = _box_sums(la * la, SSIM_WINDOW) / n - mu_a * mu_a
    var_b = _box_sums(lb * lb, SSIM_WINDOW) / n - mu_b * mu_b
    cov = _box_sums(la * lb, SSIM_WINDOW) / n - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return float(np.mean(num / den))


def coverage(mask) -> float:
    """Fraction of valid (nonzero) pixels in a mask."""
    m = np.asarray(mask)
    if m.size == 0:
        raise ValueError("mask is empty")
    return float(m.astype(bool).mean())
