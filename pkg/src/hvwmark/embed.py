"""Watermark embedders.

Three families, all built on the same trial-quantize/toggle step:

* toggle-budget embedders: single-sided (second halftone amended) and
  double-sided (cheaper of the two amendments picked), gated by a
  distortion budget T;
* the generalized per-pixel cost minimizer, which at each raster
  position evaluates leaving both pixels alone, toggling the second, or
  toggling the first, and commits the cheapest under a weighted cost of
  pre-quantization distortion plus decode disagreement.

Presets of the cost minimizer recover the plain L2 double/single-sided
optimizers and the expectation-constrained and perceptually weighted
variants.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from hvwmark.analysis import DecodeOp, ExpectedPattern, expected_pattern
from hvwmark.diffusion import Kernel, _ed_pass, kernel_lookup
from hvwmark.images import BitImage, RealMap
from hvwmark.weights import IfParams, NvfParams, importance_map, nvf_map

TOGGLE_EPSILON = 2.0 ** -20

# chosen-candidate codes
CHOICE_NONE = 0
CHOICE_TOGGLE1 = 1
CHOICE_TOGGLE2 = 2


def toggle_distortion(u, target, eps=TOGGLE_EPSILON):
    """Minimum-magnitude pre-quantization shift making u quantize to target.

    The quantizer is >=128 -> white, so reaching black needs an open
    interval: eps keeps the shifted value strictly below threshold.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if target == 255:
        return max(0.0, 128.0 - u)
    if target == 0:
        return min(0.0, 128.0 - u - eps)
    raise ValueError(f"target must be 0 or 255, got {target}")


@dataclass(frozen=True)
class DhcedConfig:
    """Toggle-budget embedder knobs: budget T and the diffusion kernel."""

    budget: float
    kernel: Kernel = field(default_factory=lambda: kernel_lookup("steinberg"))

    def __post_init__(self):
        if not np.isfinite(self.budget) or self.budget < 0:
            raise ValueError("toggle budget must be finite and >= 0")


@dataclass(frozen=True)
class EmbedConfig:
    """Cost-minimizer knobs.

    Neutral maps (None) mean all-ones.  expected: required whenever
    beta > 0.  single_sided forces the first distortion map to zero.
    force_identical_on_white restricts candidates to equal output bits
    on white watermark pixels when the two covers are pixelwise equal.
    """

    p: float = 2.0
    lam: float = 0.0
    alpha: float = 1.0
    beta: float = 0.0
    op: DecodeOp = DecodeOp.XNOR
    kernel: Kernel = field(default_factory=lambda: kernel_lookup("steinberg"))
    mask1: RealMap | None = None
    mask2: RealMap | None = None
    psi: RealMap | None = None
    expected: ExpectedPattern | None = None
    single_sided: bool = False
    force_identical_on_white: bool = False
    toggle_epsilon: float = TOGGLE_EPSILON

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("norm power p must be >= 1")
        for name in ("lam", "alpha", "beta"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0")
        if self.beta > 0 and self.expected is None:
            raise ValueError("beta > 0 requires an expected pattern")


@dataclass(frozen=True)
class EmbedResult:
    """Stego pair plus the pre-quantization distortion fields.

    choices records, per pixel, which candidate the optimizer committed
    (CHOICE_NONE / CHOICE_TOGGLE1 / CHOICE_TOGGLE2); budget embedders
    fill it with the toggled side.
    """

    y1: BitImage
    y2: BitImage
    du1: RealMap
    du2: RealMap
    choices: np.ndarray


def _check_cover_pair(x1, x2, watermark):
    if not (x1.pixels.shape == x2.pixels.shape == watermark.pixels.shape):
        raise ValueError("cover and watermark dimensions must match")


def _map_or_ones(m, shape, name):
    if m is None:
        return np.ones(shape, dtype=np.float64)
    vals = m.values if isinstance(m, RealMap) else np.asarray(m, dtype=np.float64)
    if vals.shape != shape:
        raise ValueError(f"{name} shape {vals.shape} does not match covers {shape}")
    return vals


def cost_s(du1, du2, b1, b2, m1, m2, psi, w, ep, cfg):
    """Per-pixel cost: weighted distortion plus weighted decode error.

    b1, b2 are the halftone bits this candidate would emit; w and ep are
    the watermark and expected-decode values at the pixel (0..255 scale).
    """
    if cfg.op is DecodeOp.AND:
        dec = 255.0 if (b1 == 255 and b2 == 255) else 0.0
    else:
        dec = 255.0 if b1 == b2 else 0.0
    wm_term = cfg.alpha * abs(dec - w) ** cfg.p + cfg.beta * abs(dec - ep) ** cfg.p
    return m1 * abs(du1) ** cfg.p + m2 * abs(du2) ** cfg.p + cfg.lam * psi * wm_term


# --- numba cores -----------------------------------------------------------


@njit(cache=True)
def _toggle_delta(u, target, eps):
    if target == 255.0:
        return max(0.0, 128.0 - u)
    return min(0.0, 128.0 - u - eps)


@njit(cache=True)
def _commit(x, du, err, y, i, j, d, dr, dc, wt):
    u = x[i, j] + err[i, j] + d
    bit = 255.0 if u >= 128.0 else 0.0
    y[i, j] = np.uint8(bit)
    du[i, j] = d
    e = u - bit
    h, w = x.shape
    for k in range(dr.shape[0]):
        ii = i + dr[k]
        jj = j + dc[k]
        if 0 <= ii < h and 0 <= jj < w:
            err[ii, jj] += wt[k] * e
    return bit


@njit(cache=True)
def _cadeed_pass(
    x1, x2, wm, ep, m1, m2, psi,
    lam, alpha, beta, p, op_and,
    single_sided, force_identical, eps,
    dr, dc, wt,
):
    h, w = x1.shape
    err1 = np.zeros((h, w), dtype=np.float64)
    err2 = np.zeros((h, w), dtype=np.float64)
    y1 = np.zeros((h, w), dtype=np.uint8)
    y2 = np.zeros((h, w), dtype=np.uint8)
    du1 = np.zeros((h, w), dtype=np.float64)
    du2 = np.zeros((h, w), dtype=np.float64)
    choices = np.zeros((h, w), dtype=np.int8)
    total_cost = 0.0
    for i in range(h):
        for j in range(w):
            u1 = x1[i, j] + err1[i, j]
            u2 = x2[i, j] + err2[i, j]
            b1 = 255.0 if u1 >= 128.0 else 0.0
            b2 = 255.0 if u2 >= 128.0 else 0.0
            wv = wm[i, j]
            epv = ep[i, j]
            m1v = m1[i, j]
            m2v = m2[i, j]
            psv = psi[i, j]
            forced = force_identical and wv == 255.0

            best_code = -1
            best_cost = 0.0
            best_d1 = 0.0
            best_d2 = 0.0
            # evaluation order fixes the tie-break: no toggle, toggle
            # second, toggle first
            for code in range(3):
                if code == 0:
                    d1 = 0.0
                    d2 = 0.0
                    q1 = b1
                    q2 = b2
                elif code == 1:
                    d1 = 0.0
                    d2 = _toggle_delta(u2, 255.0 - b2, eps)
                    q1 = b1
                    q2 = 255.0 - b2
                else:
                    if single_sided:
                        continue
                    d1 = _toggle_delta(u1, 255.0 - b1, eps)
                    d2 = 0.0
                    q1 = 255.0 - b1
                    q2 = b2
                if forced and q1 != q2:
                    continue
                if op_and:
                    dec = 255.0 if (q1 == 255.0 and q2 == 255.0) else 0.0
                else:
                    dec = 255.0 if q1 == q2 else 0.0
                cost = (
                    m1v * abs(d1) ** p
                    + m2v * abs(d2) ** p
                    + lam * psv * (alpha * abs(dec - wv) ** p + beta * abs(dec - epv) ** p)
                )
                if best_code < 0 or cost < best_cost:
                    best_code = code
                    best_cost = cost
                    best_d1 = d1
                    best_d2 = d2
            total_cost += best_cost
            # loop code 1 toggles the second image, 2 the first; store the
            # CHOICE_* convention (1 = first toggled, 2 = second toggled)
            if best_code == 0:
                choices[i, j] = CHOICE_NONE
            elif best_code == 1:
                choices[i, j] = CHOICE_TOGGLE2
            else:
                choices[i, j] = CHOICE_TOGGLE1
            _commit(x1, du1, err1, y1, i, j, best_d1, dr, dc, wt)
            _commit(x2, du2, err2, y2, i, j, best_d2, dr, dc, wt)
    return y1, y2, du1, du2, choices, total_cost


@njit(cache=True)
def _dhced_pass(x1, x2, wm, y1, budget, covers_equal, eps, dr, dc, wt):
    h, w = x1.shape
    err2 = np.zeros((h, w), dtype=np.float64)
    y2 = np.zeros((h, w), dtype=np.uint8)
    du2 = np.zeros((h, w), dtype=np.float64)
    choices = np.zeros((h, w), dtype=np.int8)
    for i in range(h):
        for j in range(w):
            u2 = x2[i, j] + err2[i, j]
            b2 = 255.0 if u2 >= 128.0 else 0.0
            white = wm[i, j] == 255.0
            fav = float(y1[i, j]) if white else 255.0 - float(y1[i, j])
            d = 0.0
            if b2 != fav:
                d_needed = _toggle_delta(u2, fav, eps)
                if covers_equal and white:
                    d = d_needed
                elif abs(d_needed) <= budget:
                    d = d_needed
            if d != 0.0:
                choices[i, j] = 2
            _commit(x2, du2, err2, y2, i, j, d, dr, dc, wt)
    return y2, du2, choices


@njit(cache=True)
def _dhdced_pass(x1, x2, wm, budget, covers_equal, eps, dr, dc, wt):
    h, w = x1.shape
    err1 = np.zeros((h, w), dtype=np.float64)
    err2 = np.zeros((h, w), dtype=np.float64)
    y1 = np.zeros((h, w), dtype=np.uint8)
    y2 = np.zeros((h, w), dtype=np.uint8)
    du1 = np.zeros((h, w), dtype=np.float64)
    du2 = np.zeros((h, w), dtype=np.float64)
    choices = np.zeros((h, w), dtype=np.int8)
    for i in range(h):
        for j in range(w):
            u1 = x1[i, j] + err1[i, j]
            u2 = x2[i, j] + err2[i, j]
            b1 = 255.0 if u1 >= 128.0 else 0.0
            b2 = 255.0 if u2 >= 128.0 else 0.0
            white = wm[i, j] == 255.0
            holds = (b1 == b2) if white else (b1 != b2)
            d1 = 0.0
            d2 = 0.0
            if not holds:
                want2 = b1 if white else 255.0 - b1
                want1 = b2 if white else 255.0 - b2
                s2 = _toggle_delta(u2, want2, eps)
                s1 = _toggle_delta(u1, want1, eps)
                force = covers_equal and white
                if abs(s2) <= abs(s1):
                    if force or abs(s2) <= budget:
                        d2 = s2
                        choices[i, j] = 2
                else:
                    if force or abs(s1) <= budget:
                        d1 = s1
                        choices[i, j] = 1
            _commit(x1, du1, err1, y1, i, j, d1, dr, dc, wt)
            _commit(x2, du2, err2, y2, i, j, d2, dr, dc, wt)
    return y1, y2, du1, du2, choices


# --- public embedders ------------------------------------------------------


def embed_dhced(x1, x2, watermark, cfg):
    """Single-sided toggle-budget embedding: the first halftone is plain
    error diffusion, the second is favored toward the watermark relation
    and toggled when the needed shift fits the budget."""
    _check_cover_pair(x1, x2, watermark)
    a1 = x1.pixels.astype(np.float64)
    a2 = x2.pixels.astype(np.float64)
    wm = watermark.pixels.astype(np.float64)
    dr, dc, wt = cfg.kernel.arrays()
    y1 = _ed_pass(a1, np.zeros_like(a1), dr, dc, wt)
    covers_equal = bool(np.array_equal(x1.pixels, x2.pixels))
    y2, du2, choices = _dhced_pass(
        a1, a2, wm, y1, float(cfg.budget), covers_equal, TOGGLE_EPSILON, dr, dc, wt
    )
    return EmbedResult(
        BitImage(y1), BitImage(y2), RealMap(np.zeros_like(a1)), RealMap(du2), choices
    )


def embed_dhdced(x1, x2, watermark, cfg):
    """Double-sided toggle-budget embedding: per pixel the cheaper of
    amending either halftone is applied, when it fits the budget."""
    _check_cover_pair(x1, x2, watermark)
    a1 = x1.pixels.astype(np.float64)
    a2 = x2.pixels.astype(np.float64)
    wm = watermark.pixels.astype(np.float64)
    dr, dc, wt = cfg.kernel.arrays()
    covers_equal = bool(np.array_equal(x1.pixels, x2.pixels))
    y1, y2, du1, du2, choices = _dhdced_pass(
        a1, a2, wm, float(cfg.budget), covers_equal, TOGGLE_EPSILON, dr, dc, wt
    )
    return EmbedResult(BitImage(y1), BitImage(y2), RealMap(du1), RealMap(du2), choices)


def embed_cadeed(x1, x2, watermark, cfg):
    """Per-pixel cost-minimizing embedding.

    At each raster position the candidate set {no toggle, toggle second,
    toggle first} is scored with cost_s and the cheapest is committed
    through the shared diffusion step (ties: no-toggle, then toggle
    second, then toggle first)."""
    _check_cover_pair(x1, x2, watermark)
    shape = x1.pixels.shape
    a1 = x1.pixels.astype(np.float64)
    a2 = x2.pixels.astype(np.float64)
    wm = watermark.pixels.astype(np.float64)
    m1 = _map_or_ones(cfg.mask1, shape, "mask1")
    m2 = _map_or_ones(cfg.mask2, shape, "mask2")
    psi = _map_or_ones(cfg.psi, shape, "psi")
    if cfg.beta > 0:
        if cfg.expected is None:
            raise ValueError("beta > 0 requires an expected pattern")
        ep = cfg.expected.values.values
        if ep.shape != shape:
            raise ValueError("expected pattern dimensions do not match covers")
    else:
        ep = np.zeros(shape, dtype=np.float64)
    covers_equal = bool(np.array_equal(x1.pixels, x2.pixels))
    dr, dc, wt = cfg.kernel.arrays()
    y1, y2, du1, du2, choices, _cost = _cadeed_pass(
        a1, a2, wm, ep, m1, m2, psi,
        float(cfg.lam), float(cfg.alpha), float(cfg.beta), float(cfg.p),
        cfg.op is DecodeOp.AND,
        bool(cfg.single_sided),
        bool(cfg.force_identical_on_white and covers_equal),
        float(cfg.toggle_epsilon),
        dr, dc, wt,
    )
    return EmbedResult(BitImage(y1), BitImage(y2), RealMap(du1), RealMap(du2), choices)


PRESET_NAMES = ("deed_l2", "seed_l2", "cadeed_ec", "cadeed_ni")


def preset(name, x1, x2, watermark, lam, op, kernel):
    """Build a cost-minimizer config for one of the named schemes."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")
    base = EmbedConfig(p=2.0, lam=lam, alpha=1.0, beta=0.0, op=op, kernel=kernel)
    if name == "deed_l2":
        return base
    if name == "seed_l2":
        return replace(base, single_sided=True)
    ep = expected_pattern(x1, x2, watermark, op)
    if name == "cadeed_ec":
        return replace(base, beta=1.0, expected=ep)
    return replace(
        base,
        beta=1.0,
        expected=ep,
        mask1=nvf_map(x1, NvfParams()),
        mask2=nvf_map(x2, NvfParams()),
        psi=importance_map(watermark, IfParams()),
        force_identical_on_white=True,
    )
