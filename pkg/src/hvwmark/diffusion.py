"""Error-diffusion kernels and the regular error-diffusion pass.

The pass quantizes each pixel at 128 (ties go white) and pushes the
quantization error to causal neighbours through the kernel taps.  Taps
falling outside the image are dropped without renormalization.  Scan
order is plain raster; the accumulator is never clamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from hvwmark.images import BitImage, GrayImage, RealMap


@dataclass(frozen=True)
class Kernel:
    """Causal error-diffusion kernel: taps are (row_offset, col_offset, weight)."""

    name: str
    taps: tuple

    def __post_init__(self):
        for dr, dc, _w in self.taps:
            if not (dr > 0 or (dr == 0 and dc > 0)):
                raise ValueError(f"tap ({dr},{dc}) is not strictly causal under raster order")
        total = sum(w for _, _, w in self.taps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"kernel weights sum to {total!r}, expected 1")

    def arrays(self):
        dr = np.array([t[0] for t in self.taps], dtype=np.int64)
        dc = np.array([t[1] for t in self.taps], dtype=np.int64)
        wt = np.array([t[2] for t in self.taps], dtype=np.float64)
        return dr, dc, wt


STEINBERG = Kernel(
    "steinberg",
    ((0, 1, 7 / 16), (1, -1, 3 / 16), (1, 0, 5 / 16), (1, 1, 1 / 16)),
)

JARVIS = Kernel(
    "jarvis",
    (
        (0, 1, 7 / 48), (0, 2, 5 / 48),
        (1, -2, 3 / 48), (1, -1, 5 / 48), (1, 0, 7 / 48), (1, 1, 5 / 48), (1, 2, 3 / 48),
        (2, -2, 1 / 48), (2, -1, 3 / 48), (2, 0, 5 / 48), (2, 1, 3 / 48), (2, 2, 1 / 48),
    ),
)

_KERNELS = {k.name: k for k in (STEINBERG, JARVIS)}


def kernel_lookup(name):
    try:
        return _KERNELS[name]
    except KeyError:
        supported = ", ".join(sorted(_KERNELS))
        raise KeyError(f"unknown kernel {name!r}; supported kernels: {supported}") from None


class DiffusionState:
    """Stateful per-pixel error diffusion over a fixed-size raster.

    Reference (pure Python) counterpart of the whole-image pass; the
    embedders use the same arithmetic so committed outputs reproduce
    under error_diffuse bit-exactly.
    """

    def __init__(self, width, height, kernel):
        self.width = width
        self.height = height
        self.kernel = kernel
        self.errors = np.zeros((height, width), dtype=np.float64)
        self.row = 0
        self.col = 0

    @property
    def cursor(self):
        return (self.row, self.col)

    def pending(self):
        """Diffused error waiting at the cursor."""
        return self.errors[self.row, self.col]

    def step(self, x, du=0.0):
        """Quantize the cursor pixel of intensity x (+ distortion du) and
        diffuse its error; returns the emitted bit (0 or 255)."""
        if self.row >= self.height:
            raise IndexError("diffusion cursor past end of image")
        u = x + self.errors[self.row, self.col] + du
        bit = 255.0 if u >= 128.0 else 0.0
        err = u - bit
        for dr, dc, w in self.kernel.taps:
            ii, jj = self.row + dr, self.col + dc
            if 0 <= ii < self.height and 0 <= jj < self.width:
                self.errors[ii, jj] += w * err
        self.col += 1
        if self.col == self.width:
            self.col = 0
            self.row += 1
        return int(bit)


@njit(cache=True)
def _ed_pass(x, du, dr, dc, wt):
    h, w = x.shape
    err = np.zeros((h, w), dtype=np.float64)
    out = np.zeros((h, w), dtype=np.uint8)
    ntaps = dr.shape[0]
    for i in range(h):
        for j in range(w):
            u = x[i, j] + err[i, j] + du[i, j]
            bit = 255.0 if u >= 128.0 else 0.0
            out[i, j] = np.uint8(bit)
            e = u - bit
            for k in range(ntaps):
                ii = i + dr[k]
                jj = j + dc[k]
                if 0 <= ii < h and 0 <= jj < w:
                    err[ii, jj] += wt[k] * e
    return out


def error_diffuse(image, kernel, du=None):
    """Full raster-order error-diffusion pass over image (+ optional
    pre-quantization distortion field du)."""
    x = np.asarray(image.pixels if isinstance(image, GrayImage) else image, dtype=np.float64)
    if du is None:
        du_arr = np.zeros_like(x)
    else:
        du_arr = np.asarray(du.values if isinstance(du, RealMap) else du, dtype=np.float64)
        if du_arr.shape != x.shape:
            raise ValueError(f"distortion map shape {du_arr.shape} != image shape {x.shape}")
    dr, dc, wt = kernel.arrays()
    return BitImage(_ed_pass(x, du_arr, dr, dc, wt))
