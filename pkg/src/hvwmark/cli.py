"""Command-line surface.

Verbs: halftone, embed, decode, metrics, weights, attack, sweep,
validate-analysis.  All commands are deterministic for fixed inputs and
seeds; errors exit nonzero with a single "error: ..." line on stderr.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from hvwmark.analysis import DecodeOp, expected_pattern
from hvwmark.attacks import ChannelParams, crop_attack, mark_attack, print_scan_sim
from hvwmark.diffusion import error_diffuse, kernel_lookup
from hvwmark.harness import (
    DEFAULT_LAMBDA_GRID,
    DEFAULT_VALIDATE_LAMBDA,
    SWEEP_METHODS,
    SweepSpec,
    run_method,
    run_sweep,
    validate_analysis,
)
from hvwmark.images import BitImage, GrayImage, parse_pnm, serialize_pnm
from hvwmark.metrics import MetricsReport, cb_cdr, cdr, compute_report, decode
from hvwmark.weights import importance_map, nvf_map


def _read_image(path, want=None):
    try:
        with open(path, "rb") as fh:
            img = parse_pnm(fh.read())
    except OSError as exc:
        raise RuntimeError(f"cannot read {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise RuntimeError(f"cannot parse {path}: {exc}") from exc
    if want is not None and not isinstance(img, want):
        raise RuntimeError(f"{path}: expected a {want.__name__}")
    return img


def _write_image(path, image):
    try:
        with open(path, "wb") as fh:
            fh.write(serialize_pnm(image))
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc.strerror}") from exc


def _scale_to_pgm(values):
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        scaled = np.zeros(values.shape)
    else:
        scaled = (values - lo) * (255.0 / (hi - lo))
    return GrayImage(np.round(scaled).astype(np.uint8))


def _op(name):
    return DecodeOp.AND if name == "and" else DecodeOp.XNOR


def cmd_halftone(args):
    image = _read_image(args.input, GrayImage)
    kernel = kernel_lookup(args.kernel)
    _write_image(args.out, error_diffuse(image, kernel))
    return 0


def cmd_embed(args):
    x1 = _read_image(args.x1, GrayImage)
    x2 = _read_image(args.x2 or args.x1, GrayImage)
    watermark = _read_image(args.watermark, BitImage)
    kernel = kernel_lookup(args.kernel)
    if args.method in ("dhced", "dhdced"):
        param = args.budget
    else:
        param = args.lam
    result = run_method(args.method, x1, x2, watermark, param, _op(args.op), kernel)
    _write_image(args.out_y1, result.y1)
    _write_image(args.out_y2, result.y2)
    if args.dump_du:
        np.save(args.dump_du + "_du1.npy", result.du1.values)
        np.save(args.dump_du + "_du2.npy", result.du2.values)
    vis1, vis2 = nvf_map(x1), nvf_map(x2)
    gamma = importance_map(watermark)
    report = compute_report(result, watermark, _op(args.op), vis1, vis2, gamma)
    print(MetricsReport.csv_header())
    print(report.csv_row())
    return 0


def cmd_decode(args):
    y1 = _read_image(args.y1, BitImage)
    y2 = _read_image(args.y2, BitImage)
    decoded = decode(y1, y2, _op(args.op))
    if args.out:
        _write_image(args.out, decoded)
    if args.watermark:
        watermark = _read_image(args.watermark, BitImage)
        print(f"cdr {cdr(watermark, decoded):.6f}")
        gamma = importance_map(watermark)
        print(f"cb_cdr {cb_cdr(watermark, decoded, gamma):.6f}")
    return 0


def cmd_metrics(args):
    watermark = _read_image(args.watermark, BitImage)
    decoded = _read_image(args.decoded, BitImage)
    print(f"cdr {cdr(watermark, decoded):.6f}")
    gamma = importance_map(watermark)
    print(f"cb_cdr {cb_cdr(watermark, decoded, gamma):.6f}")
    return 0


def cmd_weights(args):
    if args.kind == "nvf":
        image = _read_image(args.input, GrayImage)
        values = nvf_map(image).values
    elif args.kind == "if":
        image = _read_image(args.input, BitImage)
        values = importance_map(image).values
    else:  # ep
        x1 = _read_image(args.input, GrayImage)
        x2 = _read_image(args.x2 or args.input, GrayImage)
        watermark = _read_image(args.watermark, BitImage)
        ep = expected_pattern(x1, x2, watermark, _op(args.op), args.window)
        _write_image(args.out, GrayImage(np.round(ep.values.values).astype(np.uint8)))
        return 0
    _write_image(args.out, _scale_to_pgm(values))
    return 0


def _channel_params(args):
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                for line in fh:
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    key, _, val = line.partition("=")
                    values[key.strip()] = val.strip()
        except OSError as exc:
            raise RuntimeError(f"cannot read {args.config}: {exc.strerror}") from exc
    def pick(name, cast, default):
        if getattr(args, name, None) is not None:
            return getattr(args, name)
        if name in values:
            return cast(values[name])
        return default
    return ChannelParams(
        blur_sigma=pick("blur_sigma", float, 0.0),
        noise_sigma=pick("noise_sigma", float, 0.0),
        rotate_degrees=pick("rotate_degrees", float, 0.0),
        scale=pick("scale", float, 1.0),
        rebinarize_threshold=pick("rebinarize_threshold", int, 128),
        rng_seed=pick("seed", int, 0),
    )


def cmd_attack(args):
    image = _read_image(args.input, BitImage)
    if args.type == "crop":
        out = crop_attack(image, tuple(args.rect), args.fill)
    elif args.type == "mark":
        out = mark_attack(image, args.count, args.radius, args.seed or 0)
    else:  # printscan
        out = print_scan_sim(image, _channel_params(args))
    _write_image(args.out, out)
    return 0


def cmd_sweep(args):
    grid = tuple(args.grid) if args.grid else DEFAULT_LAMBDA_GRID
    spec = SweepSpec(
        method=args.method,
        grid=grid,
        covers=tuple(args.covers),
        watermark=args.watermark,
        op=_op(args.op),
        kernel_name=args.kernel,
        out_path=args.out,
    )
    rows = run_sweep(spec)
    if not args.out:
        print("\n".join(rows))
    return 0


def cmd_validate_analysis(args):
    records = validate_analysis(args.intensities, _op(args.op), lam=args.lam, size=args.size)
    print("intensity,op,region,predicted,empirical,deviation")
    worst = 0.0
    for rec in records:
        worst = max(worst, rec.deviation)
        print(
            f"{rec.intensity},{rec.op.value},{rec.region},"
            f"{rec.predicted:.3f},{rec.empirical:.3f},{rec.deviation:.3f}"
        )
    print(f"# max deviation {worst:.3f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hvwmark", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--op", choices=("and", "xnor"), default="xnor")
        p.add_argument("--kernel", choices=("steinberg", "jarvis"), default="steinberg")

    p = sub.add_parser("halftone", help="error-diffuse a PGM to a PBM")
    p.add_argument("--input", required=True)
    p.add_argument("--kernel", choices=("steinberg", "jarvis"), default="steinberg")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_halftone)

    p = sub.add_parser("embed", help="embed a watermark into a halftone pair")
    p.add_argument("--method", choices=SWEEP_METHODS, required=True)
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", help="second cover (defaults to --x1)")
    p.add_argument("--watermark", "-w", dest="watermark", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    p.add_argument("--T", dest="budget", type=float, default=40.0)
    add_common(p)
    p.add_argument("--out-y1", required=True)
    p.add_argument("--out-y2", required=True)
    p.add_argument("--dump-du", help="path prefix for .npy distortion dumps")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("decode", help="overlay a stego pair")
    p.add_argument("--y1", required=True)
    p.add_argument("--y2", required=True)
    p.add_argument("--watermark", "-w", dest="watermark")
    add_common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("metrics", help="decoding metrics for a decoded image")
    p.add_argument("--watermark", "-w", dest="watermark", required=True)
    p.add_argument("--decoded", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("weights", help="export NVF/IF/EP maps as PGM")
    p.add_argument("kind", choices=("nvf", "if", "ep"))
    p.add_argument("--input", required=True)
    p.add_argument("--x2")
    p.add_argument("--watermark", "-w", dest="watermark")
    p.add_argument("--window", type=int, default=1)
    add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("attack", help="apply a simulated channel attack")
    p.add_argument("type", choices=("crop", "mark", "printscan"))
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rect", type=int, nargs=4, metavar=("ROW", "COL", "H", "W"))
    p.add_argument("--fill", type=int, default=0)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--seed", type=int)
    p.add_argument("--blur-sigma", dest="blur_sigma", type=float)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float)
    p.add_argument("--rotate-degrees", dest="rotate_degrees", type=float)
    p.add_argument("--scale", type=float)
    p.add_argument("--rebinarize-threshold", dest="rebinarize_threshold", type=int)
    p.add_argument("--config", help="key=value channel parameter file")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="rate-distortion sweep to CSV")
    p.add_argument("--method", choices=SWEEP_METHODS, required=True)
    p.add_argument("--grid", type=float, nargs="+")
    p.add_argument("--covers", nargs="+", required=True)
    p.add_argument("--watermark", "-w", dest="watermark", required=True)
    add_common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate-analysis", help="compare decode model predictions to embeds")
    p.add_argument("--intensities", "-a", type=int, nargs="+", default=[64, 128, 192])
    p.add_argument("--op", choices=("and", "xnor"), default="xnor")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_VALIDATE_LAMBDA)
    p.add_argument("--size", type=int, default=256)
    p.set_defaults(func=cmd_validate_analysis)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RuntimeError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
