"""Perceptual weight maps.

Noise-visibility masks (inverse local variance, for embedding
distortion) and the importance-factor map (1 + normalized local
variance, for watermark pixels).  Windows are truncated at borders and
variances are population variances, so flat regions come out exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from hvwmark.images import BitImage, GrayImage, RealMap


class DegenerateMaskWarning(UserWarning):
    """Constant input left nothing to normalize; a neutral map was returned."""


@dataclass(frozen=True)
class NvfParams:
    window: int = 3
    strength: float = 75.0  # divisor of the max local variance

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError("NVF window must be odd and >= 3")
        if self.strength <= 0:
            raise ValueError("NVF strength must be > 0")


@dataclass(frozen=True)
class IfParams:
    window: int = 3

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError("importance window must be odd and >= 3")


def _as_float(image):
    if isinstance(image, (GrayImage, BitImage)):
        return image.pixels.astype(np.float64)
    return np.asarray(image, dtype=np.float64)


def box_mean(arr, window):
    """Mean over the window centered at each pixel, truncated at borders."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    if window == 1:
        return np.array(arr, dtype=np.float64)
    h = window // 2
    sums = _box_sum(np.asarray(arr, dtype=np.float64), h)
    counts = _box_sum(np.ones(arr.shape, dtype=np.float64), h)
    return sums / counts


def _box_sum(arr, half):
    # Integral-image window sums with clipped (truncated) borders.
    pad = np.zeros((arr.shape[0] + 1, arr.shape[1] + 1), dtype=np.float64)
    np.cumsum(arr, axis=0, out=pad[1:, 1:])
    np.cumsum(pad[1:, 1:], axis=1, out=pad[1:, 1:])
    rows, cols = arr.shape
    r0 = np.clip(np.arange(rows) - half, 0, rows)
    r1 = np.clip(np.arange(rows) + half + 1, 0, rows)
    c0 = np.clip(np.arange(cols) - half, 0, cols)
    c1 = np.clip(np.arange(cols) + half + 1, 0, cols)
    return (
        pad[np.ix_(r1, c1)] - pad[np.ix_(r0, c1)] - pad[np.ix_(r1, c0)] + pad[np.ix_(r0, c0)]
    )


def local_variance(image, window):
    """Per-pixel population variance over the truncated centered window."""
    x = _as_float(image)
    if window == 1:
        return RealMap(np.zeros_like(x))
    mean = box_mean(x, window)
    mean_sq = box_mean(x * x, window)
    var = np.maximum(mean_sq - mean * mean, 0.0)
    return RealMap(var)


def nvf_map(image, params=NvfParams()):
    """Noise visibility mask: v = 1 / (1 + theta * sigma^2) with
    theta = strength / max local variance.  Values in (0, 1]; small
    values mark texture that hides noise well."""
    var = local_variance(image, params.window).values
    var_max = var.max()
    if var_max == 0.0:
        warnings.warn("constant image: NVF mask is all ones", DegenerateMaskWarning, stacklevel=2)
        return RealMap(np.ones_like(var), degenerate=True)
    theta = params.strength / var_max
    return RealMap(1.0 / (1.0 + theta * var))


def importance_map(watermark, params=IfParams()):
    """Watermark pixel weights: 1 + sigma^2 / max sigma^2, in [1, 2].
    Structured (edge/texture) watermark pixels get the larger weights."""
    var = local_variance(watermark, params.window).values
    var_max = var.max()
    if var_max == 0.0:
        warnings.warn(
            "constant watermark: importance map is all ones", DegenerateMaskWarning, stacklevel=2
        )
        return RealMap(np.ones_like(var), degenerate=True)
    return RealMap(1.0 + var / var_max)
