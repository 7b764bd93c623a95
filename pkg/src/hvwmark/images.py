"""Image value types and bit-exact PNM (PGM/PBM) file I/O.

Grayscale images hold integer intensities 0..255, bilevel images hold
{0, 255} with 255 = white.  PBM follows the Netpbm convention where a
stored 1 means black (ink), so it maps to pixel value 0 here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class PnmError(ValueError):
    """Malformed PNM input.  Carries the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _check_dims(pixels):
    if pixels.ndim != 2:
        raise ValueError(f"expected a 2-D pixel array, got shape {pixels.shape}")
    if pixels.shape[0] < 1 or pixels.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got {pixels.shape}")


@dataclass(frozen=True)
class GrayImage:
    """8-bit continuous-tone image, row-major, values 0..255."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        _check_dims(px)
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("gray values must lie in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BitImage:
    """Bilevel image with values in {0, 255}; 255 = white."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        _check_dims(px)
        if not np.all((px == 0) | (px == 255)):
            raise ValueError("bilevel values must be exactly 0 or 255")
        object.__setattr__(self, "pixels", px.astype(np.uint8))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]


@dataclass(frozen=True)
class RealMap:
    """Per-pixel real-valued field (distortion maps, weight masks)."""

    values: np.ndarray
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        _check_dims(vals)
        if not np.all(np.isfinite(vals)):
            raise ValueError("map values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]


def binarize(image, threshold=128):
    """Threshold a grayscale image: >= threshold goes white."""
    px = image.pixels if isinstance(image, (GrayImage, BitImage)) else np.asarray(image)
    return BitImage(np.where(px >= threshold, 255, 0).astype(np.uint8))


# --- PNM parsing -----------------------------------------------------------

_WHITESPACE = b" \t\r\n\x0b\x0c"


class _Scanner:
    """Tokenizer over a PNM header; skips whitespace and '#' comments."""

    def __init__(self, data):
        self.data = data
        self.pos = 0

    def skip_separators(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in (b"#",):
                nl = data.find(b"\n", self.pos)
                if nl < 0:
                    raise PnmError("unterminated comment", self.pos)
                self.pos = nl + 1
            elif c in _WHITESPACE and c != b"":
                self.pos += 1
            else:
                return

    def token(self):
        self.skip_separators()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos : self.pos + 1] not in _WHITESPACE:
            if data[self.pos : self.pos + 1] == b"#":
                break
            self.pos += 1
        if self.pos == start:
            raise PnmError("unexpected end of header", start)
        return data[start : self.pos]

    def int_token(self, what):
        start = self.pos
        tok = self.token()
        try:
            return int(tok)
        except ValueError:
            raise PnmError(f"invalid {what} {tok!r}", start) from None


def parse_pnm(data):
    """Parse PGM (P2/P5, maxval 255) or PBM (P1/P4) bytes.

    PGM yields a GrayImage; PBM yields a BitImage with stored 1 (black)
    mapped to 0 and stored 0 (white) mapped to 255.
    """
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise TypeError("parse_pnm expects bytes")
    data = bytes(data)
    sc = _Scanner(data)
    magic = sc.token()
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise PnmError(f"unsupported magic {magic!r}", 0)
    width = sc.int_token("width")
    height = sc.int_token("height")
    if width < 1 or height < 1:
        raise PnmError(f"zero or negative dimension {width}x{height}", sc.pos)
    is_gray = magic in (b"P2", b"P5")
    if is_gray:
        maxval_at = sc.pos
        maxval = sc.int_token("maxval")
        if maxval != 255:
            raise PnmError(f"unsupported maxval {maxval}", maxval_at)

    if magic == b"P2":
        vals = _read_ascii_ints(sc, width * height, 255)
        return GrayImage(np.array(vals, dtype=np.uint8).reshape(height, width))
    if magic == b"P1":
        vals = _read_ascii_bits(sc, width * height)
        bits = np.array(vals, dtype=np.uint8).reshape(height, width)
        return BitImage(np.where(bits == 1, 0, 255).astype(np.uint8))

    # Binary payloads start after exactly one whitespace byte.
    if sc.pos >= len(data) or data[sc.pos : sc.pos + 1] not in _WHITESPACE:
        raise PnmError("missing separator before binary payload", sc.pos)
    start = sc.pos + 1
    if magic == b"P5":
        need = width * height
        payload = data[start : start + need]
        if len(payload) < need:
            raise PnmError("truncated payload", start + len(payload))
        return GrayImage(np.frombuffer(payload, dtype=np.uint8).reshape(height, width))
    # P4: rows padded to byte boundaries
    row_bytes = (width + 7) // 8
    need = row_bytes * height
    payload = data[start : start + need]
    if len(payload) < need:
        raise PnmError("truncated payload", start + len(payload))
    rows = np.frombuffer(payload, dtype=np.uint8).reshape(height, row_bytes)
    bits = np.unpackbits(rows, axis=1)[:, :width]
    return BitImage(np.where(bits == 1, 0, 255).astype(np.uint8))


def _read_ascii_ints(sc, count, maxval):
    vals = []
    for _ in range(count):
        at = sc.pos
        v = sc.int_token("sample")
        if v < 0 or v > maxval:
            raise PnmError(f"sample {v} out of range 0..{maxval}", at)
        vals.append(v)
    return vals


def _read_ascii_bits(sc, count):
    # P1 allows bits to be packed without separating whitespace.
    vals = []
    data = sc.data
    while len(vals) < count:
        sc.skip_separators()
        if sc.pos >= len(data):
            raise PnmError("truncated payload", sc.pos)
        c = data[sc.pos : sc.pos + 1]
        if c not in (b"0", b"1"):
            raise PnmError(f"invalid bit {c!r}", sc.pos)
        vals.append(int(c))
        sc.pos += 1
    return vals


def serialize_pnm(image):
    """Canonical binary PNM bytes: P5 for gray, P4 for bilevel.

    Header is a single space-separated line with no comments, so
    parse_pnm(serialize_pnm(x)) round-trips bit-for-bit.
    """
    if isinstance(image, GrayImage):
        header = f"P5 {image.width} {image.height} 255\n".encode("ascii")
        return header + image.pixels.tobytes()
    if isinstance(image, BitImage):
        header = f"P4 {image.width} {image.height}\n".encode("ascii")
        bits = (image.pixels == 0).astype(np.uint8)
        packed = np.packbits(bits, axis=1)
        return header + packed.tobytes()
    raise TypeError(f"cannot serialize {type(image).__name__}")
