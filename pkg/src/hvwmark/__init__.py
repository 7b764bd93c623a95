"""Halftone visual watermarking: embed a binary pattern into pairs of
error-diffused halftones so that overlaying (AND) or XNOR-ing the pair
reveals the pattern."""

from hvwmark.images import BitImage, GrayImage, RealMap, binarize, parse_pnm, serialize_pnm
from hvwmark.diffusion import Kernel, DiffusionState, error_diffuse, kernel_lookup
from hvwmark.analysis import DecodeOp, ExpectedPattern, expected_pattern, expected_value, predicted_contrast
from hvwmark.weights import IfParams, NvfParams, importance_map, local_variance, nvf_map
from hvwmark.embed import (
    DhcedConfig,
    EmbedConfig,
    EmbedResult,
    cost_s,
    embed_cadeed,
    embed_dhced,
    embed_dhdced,
    preset,
    toggle_distortion,
)
from hvwmark.metrics import MetricsReport, cb_cdr, cdr, compute_report, decode, nt_psnr, psnr, sse
from hvwmark.attacks import ChannelParams, crop_attack, mark_attack, print_scan_sim

__all__ = [
    "BitImage", "GrayImage", "RealMap", "binarize", "parse_pnm", "serialize_pnm",
    "Kernel", "DiffusionState", "error_diffuse", "kernel_lookup",
    "DecodeOp", "ExpectedPattern", "expected_pattern", "expected_value", "predicted_contrast",
    "IfParams", "NvfParams", "importance_map", "local_variance", "nvf_map",
    "DhcedConfig", "EmbedConfig", "EmbedResult", "cost_s",
    "embed_cadeed", "embed_dhced", "embed_dhdced", "preset", "toggle_distortion",
    "MetricsReport", "cb_cdr", "cdr", "compute_report", "decode", "nt_psnr", "psnr", "sse",
    "ChannelParams", "crop_attack", "mark_attack", "print_scan_sim",
]
