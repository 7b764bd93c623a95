"""Overlay decoding and quality/decoding metrics.

Distortion metrics work on the pre-quantization distortion fields, not
on low-pass-filtered halftones, so they are free of filter-selection
effects.  An all-zero field would give infinite PSNR; it is capped at
99 dB so CSV output stays finite and sortable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hvwmark.analysis import DecodeOp
from hvwmark.images import BitImage, RealMap

PSNR_CAP_DB = 99.0


def _pair_arrays(a, b, what):
    pa = a.pixels if isinstance(a, BitImage) else np.asarray(a)
    pb = b.pixels if isinstance(b, BitImage) else np.asarray(b)
    if pa.shape != pb.shape:
        raise ValueError(f"{what} dimensions must match: {pa.shape} vs {pb.shape}")
    return pa, pb


def decode(y1, y2, op):
    """Overlay the stego pair: AND is white only where both are white,
    XNOR is white where they agree."""
    p1, p2 = _pair_arrays(y1, y2, "stego image")
    if op is DecodeOp.AND:
        out = np.where((p1 == 255) & (p2 == 255), 255, 0)
    else:
        out = np.where(p1 == p2, 255, 0)
    return BitImage(out.astype(np.uint8))


def _values(m):
    return m.values if isinstance(m, RealMap) else np.asarray(m, dtype=np.float64)


def sse(du1, du2):
    """Total squared embedding distortion over both fields."""
    v1, v2 = _values(du1), _values(du2)
    if v1.shape != v2.shape:
        raise ValueError(f"distortion map dimensions must match: {v1.shape} vs {v2.shape}")
    return float(np.sum(v1 * v1) + np.sum(v2 * v2))


def psnr(du):
    """Distortion PSNR of one field in dB (99 dB cap for zero distortion)."""
    v = _values(du)
    mse = float(np.mean(v * v))
    if mse == 0.0:
        return PSNR_CAP_DB
    return 10.0 * math.log10(255.0 ** 2 / mse)


def nt_psnr(du, visibility):
    """PSNR with squared distortions weighted by the noise-visibility
    mask: distortion hidden in textured regions is discounted."""
    v = _values(du)
    vis = _values(visibility)
    if v.shape != vis.shape:
        raise ValueError(f"visibility map shape {vis.shape} != distortion shape {v.shape}")
    wmse = float(np.mean(v * v * vis))
    if wmse == 0.0:
        return PSNR_CAP_DB
    return 10.0 * math.log10(255.0 ** 2 / wmse)


def cdr(watermark, decoded):
    """Fraction of watermark pixels decoded correctly."""
    w, d = _pair_arrays(watermark, decoded, "watermark/decoded")
    return float(np.mean(w == d))


def cb_cdr(watermark, decoded, gamma):
    """Correct-decoding rate weighted by per-pixel watermark importance."""
    w, d = _pair_arrays(watermark, decoded, "watermark/decoded")
    g = _values(gamma)
    if g.shape != w.shape:
        raise ValueError(f"weight map shape {g.shape} != watermark shape {w.shape}")
    return float(np.sum(g * (w == d)) / np.sum(g))


CSV_COLUMNS = (
    "sse",
    "psnr1", "psnr2", "psnr_avg",
    "nt_psnr1", "nt_psnr2", "nt_psnr_avg",
    "cdr", "cb_cdr",
)


@dataclass(frozen=True)
class MetricsReport:
    sse: float
    psnr1: float
    psnr2: float
    psnr_avg: float
    nt_psnr1: float
    nt_psnr2: float
    nt_psnr_avg: float
    cdr: float
    cb_cdr: float

    @staticmethod
    def csv_header():
        return ",".join(CSV_COLUMNS)

    def csv_row(self):
        return ",".join(f"{getattr(self, c):.6f}" for c in CSV_COLUMNS)

    def text_block(self):
        lines = [
            f"SSE          {self.sse:.6f}",
            f"PSNR         {self.psnr1:.4f} / {self.psnr2:.4f} dB (avg {self.psnr_avg:.4f})",
            f"NT-PSNR      {self.nt_psnr1:.4f} / {self.nt_psnr2:.4f} dB (avg {self.nt_psnr_avg:.4f})",
            f"CDR          {self.cdr:.6f}",
            f"CB-CDR       {self.cb_cdr:.6f}",
        ]
        return "\n".join(lines)


def compute_report(result, watermark, op, visibility1=None, visibility2=None, gamma=None):
    """Assemble the full metrics row for an embedding result.

    visibility1/2 default to neutral (NT-PSNR equals PSNR) and gamma to
    uniform (CB-CDR equals CDR)."""
    d = decode(result.y1, result.y2, op)
    ones = np.ones(watermark.pixels.shape, dtype=np.float64)
    v1 = visibility1 if visibility1 is not None else ones
    v2 = visibility2 if visibility2 is not None else ones
    g = gamma if gamma is not None else ones
    p1 = psnr(result.du1)
    p2 = psnr(result.du2)
    n1 = nt_psnr(result.du1, v1)
    n2 = nt_psnr(result.du2, v2)
    return MetricsReport(
        sse=sse(result.du1, result.du2),
        psnr1=p1, psnr2=p2, psnr_avg=0.5 * (p1 + p2),
        nt_psnr1=n1, nt_psnr2=n2, nt_psnr_avg=0.5 * (n1 + n2),
        cdr=cdr(watermark, d),
        cb_cdr=cb_cdr(watermark, d, g),
    )
