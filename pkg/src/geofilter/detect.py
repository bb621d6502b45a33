"""Minimal FAST-9 corner detector: full segment test on the 16-pixel
Bresenham circle with non-maximal suppression by arc score."""

from __future__ import annotations

from typing import List

import numpy as np

from .core import PixelPoint

# radius-3 Bresenham circle, clockwise from 12 o'clock
CIRCLE16 = ((0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
            (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2),
            (-1, -3))


def _ring_values(img: np.ndarray) -> np.ndarray:
    """(H-6, W-6, 16) array of circle intensities for every interior pixel."""
    h, w = img.shape
    core_h, core_w = h - 6, w - 6
    out = np.empty((core_h, core_w, 16), dtype=np.int32)
    for i, (dx, dy) in enumerate(CIRCLE16):
        out[:, :, i] = img[3 + dy:3 + dy + core_h, 3 + dx:3 + dx + core_w]
    return out


def detect_fast9(image: np.ndarray, threshold: float = 20.0) -> List[PixelPoint]:
    """Corners where at least 9 contiguous circle pixels are all brighter than
    I_p + t or all darker than I_p - t, after 3x3 non-maximal suppression on
    the contiguous-arc SAD score."""
    img = np.asarray(image, dtype=np.int32)
    if img.ndim != 2 or img.shape[0] < 7 or img.shape[1] < 7:
        raise ValueError("image must be a 2D raster of at least 7x7")
    ring = _ring_values(img)
    center = img[3:-3, 3:-3][:, :, None].astype(np.int32)
    bright = ring > center + threshold
    dark = ring < center - threshold
    diffs = np.abs(ring - center)

    score = np.zeros(bright.shape[:2], dtype=np.int64)
    is_corner = np.zeros(bright.shape[:2], dtype=bool)
    bright2 = np.concatenate([bright, bright[:, :, :8]], axis=2)
    dark2 = np.concatenate([dark, dark[:, :, :8]], axis=2)
    diffs2 = np.concatenate([diffs, diffs[:, :, :8]], axis=2)
    for start in range(16):
        for mask2 in (bright2, dark2):
            arc = mask2[:, :, start:start + 9].all(axis=2)
            if not arc.any():
                continue
            arc_score = diffs2[:, :, start:start + 9].sum(axis=2)
            is_corner |= arc
            score = np.where(arc, np.maximum(score, arc_score), score)

    # non-maximal suppression over the 3x3 neighborhood
    padded = np.zeros((score.shape[0] + 2, score.shape[1] + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = np.where(is_corner, score, 0)
    keep = is_corner.copy()
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            neighbor = padded[1 + dy:padded.shape[0] - 1 + dy,
                              1 + dx:padded.shape[1] - 1 + dx]
            keep &= score >= neighbor
    ys, xs = np.nonzero(keep)
    return [PixelPoint(float(x + 3), float(y + 3)) for y, x in
            sorted(zip(ys, xs))]
