"""Experiment harness: parameter sweeps producing rate-distortion CSV
rows, and the analysis validation experiment on constant covers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from hvwmark.analysis import DecodeOp, expected_value
from hvwmark.diffusion import kernel_lookup
from hvwmark.embed import DhcedConfig, embed_cadeed, embed_dhced, embed_dhdced, preset
from hvwmark.images import BitImage, GrayImage, parse_pnm
from hvwmark.metrics import compute_report, decode
from hvwmark.weights import importance_map, nvf_map

SWEEP_METHODS = ("dhced", "dhdced", "deed_l2", "seed_l2", "cadeed_ec", "cadeed_ni")

# logarithmic lambda grid bracketing the useful tradeoff region
DEFAULT_LAMBDA_GRID = tuple(float(v) for v in np.logspace(-4, -1, 10))

SWEEP_CSV_COLUMNS = ("cover", "method", "param", "sse", "psnr_avg", "nt_psnr_avg", "cdr", "cb_cdr")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a method, its parameter grid (lambda, or the toggle
    budget T for the budget embedders), covers used as both halves of
    the pair, and the watermark."""

    method: str
    grid: tuple
    covers: tuple          # paths or (name, GrayImage) pairs
    watermark: object      # path or BitImage
    op: DecodeOp = DecodeOp.XNOR
    kernel_name: str = "steinberg"
    out_path: str | None = None

    def __post_init__(self):
        if self.method not in SWEEP_METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {SWEEP_METHODS}")
        if len(self.grid) == 0:
            raise ValueError("parameter grid must be nonempty")
        if list(self.grid) != sorted(self.grid):
            raise ValueError("parameter grid must be sorted ascending")


def run_method(method, x1, x2, watermark, param, op, kernel):
    """Run one embedder by name; param is T for the budget embedders
    and lambda for the cost-minimizer presets."""
    if method == "dhced":
        return embed_dhced(x1, x2, watermark, DhcedConfig(budget=param, kernel=kernel))
    if method == "dhdced":
        return embed_dhdced(x1, x2, watermark, DhcedConfig(budget=param, kernel=kernel))
    cfg = preset(method, x1, x2, watermark, param, op, kernel)
    return embed_cadeed(x1, x2, watermark, cfg)


def _load_cover(entry):
    if isinstance(entry, tuple):
        name, img = entry
        return str(name), img
    with open(entry, "rb") as fh:
        img = parse_pnm(fh.read())
    if not isinstance(img, GrayImage):
        raise ValueError(f"cover {entry} is not a grayscale image")
    return os.path.basename(str(entry)), img


def _load_watermark(entry):
    if isinstance(entry, BitImage):
        return entry
    with open(entry, "rb") as fh:
        img = parse_pnm(fh.read())
    if not isinstance(img, BitImage):
        raise ValueError(f"watermark {entry} is not a bilevel image")
    return img


def max_workers():
    raw = os.environ.get("HVW_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"HVW_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def run_sweep(spec):
    """Execute the sweep and return CSV rows (header first).

    Rows are ordered by (cover, grid index) regardless of execution
    order.  If out_path is set the CSV is written there; any failure
    removes the partial file."""
    kernel = kernel_lookup(spec.kernel_name)
    watermark = _load_watermark(spec.watermark)
    gamma = importance_map(watermark)
    covers = [_load_cover(c) for c in spec.covers]

    points = []
    for name, cover in covers:
        vis = nvf_map(cover)
        for param in spec.grid:
            points.append((name, cover, vis, float(param)))

    def run_point(point):
        name, cover, vis, param = point
        result = run_method(spec.method, cover, cover, watermark, param, spec.op, kernel)
        report = compute_report(result, watermark, spec.op, vis, vis, gamma)
        return (
            f"{name},{spec.method},{param:.6g},{report.sse:.6f},{report.psnr_avg:.6f},"
            f"{report.nt_psnr_avg:.6f},{report.cdr:.6f},{report.cb_cdr:.6f}"
        )

    rows = [",".join(SWEEP_CSV_COLUMNS)]
    try:
        workers = max_workers()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows.extend(pool.map(run_point, points))
        else:
            rows.extend(run_point(p) for p in points)
    except Exception:
        if spec.out_path and os.path.exists(spec.out_path):
            os.remove(spec.out_path)
        raise
    if spec.out_path:
        try:
            with open(spec.out_path, "w") as fh:
                fh.write("\n".join(rows) + "\n")
        except Exception:
            if os.path.exists(spec.out_path):
                os.remove(spec.out_path)
            raise
    return rows


# Moderate tradeoff weight used by the analysis validation: strong
# enough to establish the favored pixel relations on constant covers,
# weak enough that regional tone is preserved.
DEFAULT_VALIDATE_LAMBDA = 1.6e-2


@dataclass(frozen=True)
class ValidationRecord:
    intensity: int
    op: DecodeOp
    region: str            # "white" or "black"
    predicted: float
    empirical: float

    @property
    def deviation(self):
        return abs(self.empirical - self.predicted)


def validate_analysis(
    intensities,
    op,
    lam=DEFAULT_VALIDATE_LAMBDA,
    size=256,
    kernel_name="steinberg",
):
    """Check the probabilistic decode model against real embeds.

    For each intensity builds constant covers and a half-white /
    half-black watermark, embeds with the expectation-constrained
    preset, decodes, and compares region means against the closed-form
    predictions."""
    kernel = kernel_lookup(kernel_name)
    records = []
    half = size // 2
    wm = np.zeros((size, size), dtype=np.uint8)
    wm[:, :half] = 255
    watermark = BitImage(wm)
    for a in intensities:
        if not 0 <= a <= 255:
            raise ValueError(f"intensity {a} out of range 0..255")
        cover = GrayImage(np.full((size, size), a, dtype=np.uint8))
        cfg = preset("cadeed_ec", cover, cover, watermark, lam, op, kernel)
        result = embed_cadeed(cover, cover, watermark, cfg)
        decoded = decode(result.y1, result.y2, op).pixels.astype(np.float64)
        for region, mask in (("white", wm == 255), ("black", wm == 0)):
            records.append(
                ValidationRecord(
                    intensity=int(a),
                    op=op,
                    region=region,
                    predicted=expected_value(a, a, region == "white", op),
                    empirical=float(decoded[mask].mean()),
                )
            )
    return records
