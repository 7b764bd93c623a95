"""Probabilistic model of the decoded overlay.

Treats each cover region as locally constant with intensities A and B;
the stego halftones then behave like coupled Bernoulli fields (pushed
to match on white watermark pixels, to mismatch on black ones).  The
closed forms below are the resulting expected decode values and the
contrast between white- and black-region halves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from hvwmark.images import RealMap
from hvwmark.weights import box_mean


class DecodeOp(enum.Enum):
    AND = "and"
    XNOR = "xnor"


class UndefinedContrastError(ZeroDivisionError):
    pass


def expected_value(a, b, in_white, op):
    """Expected decoded gray level for local cover intensities (a, b).

    White watermark regions favor equal halftone pixels; black regions
    favor conjugate pixels.  Values follow from the maximal/minimal
    couplings of the two tone-preserving Bernoulli fields.
    """
    if not (0 <= a <= 255 and 0 <= b <= 255):
        raise ValueError(f"intensities must lie in [0, 255], got {a}, {b}")
    if in_white:
        if op is DecodeOp.AND:
            # equal pixels: both white exactly when the darker side is white
            return float(min(a, b))
        return 255.0 - abs(a - b)
    if op is DecodeOp.AND:
        s = a + b
        return 0.0 if s <= 255 else float(s - 255)
    return float(abs((a + b) - 255))


def predicted_contrast(a, b, op):
    """Contrast between the white-region and black-region halves of the
    decoded overlay; 1 is a fully clean reveal."""
    if not (0 <= a <= 255 and 0 <= b <= 255):
        raise ValueError(f"intensities must lie in [0, 255], got {a}, {b}")
    if op is DecodeOp.AND:
        if a + b <= 255:
            return 1.0
        denom = 255.0 - min(a, b)
        if denom == 0.0:
            raise UndefinedContrastError("contrast undefined: min(a, b) = 255")
        return 1.0 - (a + b - 255.0) / denom
    denom = 255.0 - abs(a - b)
    if denom == 0.0:
        raise UndefinedContrastError("contrast undefined: |a - b| = 255")
    return (255.0 - abs(a - b) - abs((a + b) - 255.0)) / denom


@dataclass(frozen=True)
class ExpectedPattern:
    """Expected decoded pattern as a continuous field in [0, 255]."""

    values: RealMap
    op: DecodeOp
    window: int

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("window must be odd and >= 1")
        vals = self.values.values
        if np.any(vals < 0) or np.any(vals > 255):
            raise ValueError("expected pattern values must lie in [0, 255]")


def expected_pattern(x1, x2, watermark, op, window=1):
    """Per-pixel expected decode given the covers and the watermark.

    Local intensities are truncated box means of the covers over the
    given window (window 1 = the pixel itself)."""
    if not (x1.pixels.shape == x2.pixels.shape == watermark.pixels.shape):
        raise ValueError("cover and watermark dimensions must match")
    a = box_mean(x1.pixels.astype(np.float64), window)
    b = box_mean(x2.pixels.astype(np.float64), window)
    white = watermark.pixels == 255
    s = a + b
    if op is DecodeOp.AND:
        ep = np.where(white, np.minimum(a, b), np.maximum(s - 255.0, 0.0))
    else:
        ep = np.where(white, 255.0 - np.abs(a - b), np.abs(s - 255.0))
    return ExpectedPattern(RealMap(ep), op, window)
