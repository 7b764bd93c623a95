"""Independent reference implementations used as test oracles.

Everything here is deliberately written against the documented behavior
only (plain Python loops, own error buffers) so agreement with the
library is evidence, not tautology.
"""

import numpy as np

from hvwmark.analysis import DecodeOp
from hvwmark.embed import CHOICE_NONE, CHOICE_TOGGLE1, CHOICE_TOGGLE2, TOGGLE_EPSILON, cost_s


def _toggle(u, target, eps=TOGGLE_EPSILON):
    if target == 255.0:
        return max(0.0, 128.0 - u)
    return min(0.0, 128.0 - u - eps)


def _decode_bit(q1, q2, op):
    if op is DecodeOp.AND:
        return 255.0 if (q1 == 255.0 and q2 == 255.0) else 0.0
    return 255.0 if q1 == q2 else 0.0


def reference_deed(x1, x2, watermark, lam, op, kernel, p=2.0):
    """Plain-Python recursion for the neutral L2 double-sided optimizer.

    At each raster pixel the three candidates (keep both, toggle the
    second, toggle the first) are costed as |du1|^p + |du2|^p +
    lam*|decode - w|^p and the first strict minimum wins.
    """
    a1 = np.asarray(x1, dtype=np.float64)
    a2 = np.asarray(x2, dtype=np.float64)
    wm = np.asarray(watermark, dtype=np.float64)
    h, w = a1.shape
    e1 = np.zeros((h, w))
    e2 = np.zeros((h, w))
    y1 = np.zeros((h, w), dtype=np.uint8)
    y2 = np.zeros((h, w), dtype=np.uint8)
    for i in range(h):
        for j in range(w):
            u1 = a1[i, j] + e1[i, j]
            u2 = a2[i, j] + e2[i, j]
            b1 = 255.0 if u1 >= 128.0 else 0.0
            b2 = 255.0 if u2 >= 128.0 else 0.0
            cands = [
                (0.0, 0.0, b1, b2),
                (0.0, _toggle(u2, 255.0 - b2), b1, 255.0 - b2),
                (_toggle(u1, 255.0 - b1), 0.0, 255.0 - b1, b2),
            ]
            best = None
            best_cost = None
            for d1, d2, q1, q2 in cands:
                dec = _decode_bit(q1, q2, op)
                cost = abs(d1) ** p + abs(d2) ** p + lam * abs(dec - wm[i, j]) ** p
                if best_cost is None or cost < best_cost:
                    best = (d1, d2)
                    best_cost = cost
            d1, d2 = best
            for a, e, y, d in ((a1, e1, y1, d1), (a2, e2, y2, d2)):
                u = a[i, j] + e[i, j] + d
                bit = 255.0 if u >= 128.0 else 0.0
                y[i, j] = np.uint8(bit)
                res = u - bit
                for dr, dc, wt in kernel.taps:
                    ii, jj = i + dr, j + dc
                    if 0 <= ii < h and 0 <= jj < w:
                        e[ii, jj] += wt * res
    return y1, y2


def replay_accumulators(x, du, kernel):
    """Pre-toggle accumulator values u = x + diffused error (before du is
    applied), reconstructed by replaying the committed distortion field."""
    a = np.asarray(x, dtype=np.float64)
    d = np.asarray(du, dtype=np.float64)
    h, w = a.shape
    err = np.zeros((h, w))
    u_pre = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            u_pre[i, j] = a[i, j] + err[i, j]
            u = u_pre[i, j] + d[i, j]
            bit = 255.0 if u >= 128.0 else 0.0
            res = u - bit
            for dr, dc, wt in kernel.taps:
                ii, jj = i + dr, j + dc
                if 0 <= ii < h and 0 <= jj < w:
                    err[ii, jj] += wt * res
    return u_pre


def optimality_violations(x1, x2, watermark, cfg, result):
    """Count pixels where the committed candidate does not minimize the
    per-pixel cost over the admissible candidate set."""
    a1 = x1.pixels.astype(np.float64)
    a2 = x2.pixels.astype(np.float64)
    wm = watermark.pixels.astype(np.float64)
    shape = a1.shape
    ones = np.ones(shape)
    m1 = cfg.mask1.values if cfg.mask1 is not None else ones
    m2 = cfg.mask2.values if cfg.mask2 is not None else ones
    psi = cfg.psi.values if cfg.psi is not None else ones
    ep = cfg.expected.values.values if cfg.expected is not None else np.zeros(shape)
    forced_on = cfg.force_identical_on_white and np.array_equal(x1.pixels, x2.pixels)

    u1 = replay_accumulators(a1, result.du1.values, cfg.kernel)
    u2 = replay_accumulators(a2, result.du2.values, cfg.kernel)
    choice_of = {0: CHOICE_NONE, 1: CHOICE_TOGGLE2, 2: CHOICE_TOGGLE1}

    bad = 0
    h, w = shape
    for i in range(h):
        for j in range(w):
            b1 = 255.0 if u1[i, j] >= 128.0 else 0.0
            b2 = 255.0 if u2[i, j] >= 128.0 else 0.0
            cands = [
                (0, 0.0, 0.0, b1, b2),
                (1, 0.0, _toggle(u2[i, j], 255.0 - b2, cfg.toggle_epsilon), b1, 255.0 - b2),
                (2, _toggle(u1[i, j], 255.0 - b1, cfg.toggle_epsilon), 0.0, 255.0 - b1, b2),
            ]
            best = None
            for idx, d1, d2, q1, q2 in cands:
                if idx == 2 and cfg.single_sided:
                    continue
                if forced_on and wm[i, j] == 255.0 and q1 != q2:
                    continue
                cost = cost_s(
                    d1, d2, q1, q2, m1[i, j], m2[i, j], psi[i, j], wm[i, j], ep[i, j], cfg
                )
                if best is None or cost < best[0]:
                    best = (cost, idx, d1, d2)
            _, idx, d1, d2 = best
            if (
                result.choices[i, j] != choice_of[idx]
                or result.du1.values[i, j] != d1
                or result.du2.values[i, j] != d2
            ):
                bad += 1
    return bad
