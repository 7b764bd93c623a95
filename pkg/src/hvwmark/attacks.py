"""Simulated channel degradations: cropping, human marking, and a
parametric print-and-scan surrogate (blur + noise + small geometric
distortion + rebinarization).  Everything is deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from hvwmark.images import BitImage, binarize


@dataclass(frozen=True)
class ChannelParams:
    blur_sigma: float = 0.0       # pixels
    noise_sigma: float = 0.0      # gray levels
    rotate_degrees: float = 0.0
    scale: float = 1.0
    rebinarize_threshold: int = 128
    rng_seed: int = 0

    def __post_init__(self):
        if self.blur_sigma < 0 or self.noise_sigma < 0:
            raise ValueError("blur/noise sigma must be >= 0")
        if self.scale <= 0:
            raise ValueError("scale must be > 0")
        if not 0 <= self.rebinarize_threshold <= 255:
            raise ValueError("rebinarize threshold must lie in 0..255")


def crop_attack(image, rect, fill):
    """Replace the (row, col, height, width) rectangle with fill."""
    row, col, h, w = rect
    if h < 0 or w < 0:
        raise ValueError("crop extent must be >= 0")
    if row < 0 or col < 0 or row + h > image.height or col + w > image.width:
        raise ValueError(f"crop rect {rect} out of bounds for {image.height}x{image.width}")
    if fill not in (0, 255):
        raise ValueError("fill must be 0 or 255")
    out = image.pixels.copy()
    out[row : row + h, col : col + w] = fill
    return BitImage(out)


def mark_attack(image, count, radius, seed):
    """Blot the image with count pseudo-random black discs."""
    if count < 0:
        raise ValueError("count must be >= 0")
    out = image.pixels.copy()
    if count == 0:
        return BitImage(out)
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, image.height, size=count)
    cols = rng.integers(0, image.width, size=count)
    yy, xx = np.ogrid[: image.height, : image.width]
    for r, c in zip(rows, cols):
        out[(yy - r) ** 2 + (xx - c) ** 2 <= radius ** 2] = 0
    return BitImage(out)


def print_scan_sim(image, params):
    """Surrogate print-and-scan channel.

    Pipeline: gaussian blur, seeded additive gaussian noise, small
    bilinear rotation, downscale-then-restore, rebinarize.  Neutral
    parameters reduce to the identity on bilevel input.
    """
    x = image.pixels.astype(np.float64)
    if params.blur_sigma > 0:
        x = ndimage.gaussian_filter(x, params.blur_sigma)
    if params.noise_sigma > 0:
        rng = np.random.default_rng(params.rng_seed)
        x = x + rng.normal(0.0, params.noise_sigma, size=x.shape)
    if params.rotate_degrees != 0.0:
        x = ndimage.rotate(x, params.rotate_degrees, reshape=False, order=1, mode="nearest")
    if params.scale != 1.0:
        scaled = ndimage.zoom(x, params.scale, order=1, mode="nearest")
        restore = (x.shape[0] / scaled.shape[0], x.shape[1] / scaled.shape[1])
        x = ndimage.zoom(scaled, restore, order=1, mode="nearest")
        # zoom rounding can leave the restored raster one pixel off
        x = _fit_to(x, image.pixels.shape)
    return binarize(np.clip(x, 0, 255), params.rebinarize_threshold)


def _fit_to(arr, shape):
    out = np.zeros(shape, dtype=arr.dtype)
    h = min(shape[0], arr.shape[0])
    w = min(shape[1], arr.shape[1])
    out[:h, :w] = arr[:h, :w]
    if arr.shape[0] < shape[0]:
        out[h:, :] = out[h - 1 : h, :]
    if arr.shape[1] < shape[1]:
        out[:, w:] = out[:, w - 1 : w]
    return out
