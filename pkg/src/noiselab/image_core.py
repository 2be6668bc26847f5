"""8-bit grayscale/RGB rasters, luma conversion, histograms and PNM I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np


class PnmFormatError(ValueError):
    """Malformed, truncated or unsupported PNM data."""


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero (numpy rounds to even)."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))


def to_uint8(x: np.ndarray) -> np.ndarray:
    """Round half away from zero, then clamp to [0, 255]."""
    return np.clip(round_half_away(x), 0, 255).astype(np.uint8)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.uint8, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major 8-bit grayscale raster; ``pixels`` has shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"gray image needs a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("width and height must be >= 1")
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255) or np.any(arr != np.round(arr)):
                raise ValueError("intensities must be integers in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(arr))

    @classmethod
    def from_values(cls, width: int, height: int, values) -> GrayImage:
        values = list(values)
        if len(values) != width * height:
            raise ValueError(f"expected {width * height} pixels, got {len(values)}")
        return cls(np.array(values, dtype=np.int64).reshape(height, width))

    @classmethod
    def constant(cls, width: int, height: int, value: int) -> GrayImage:
        return cls(np.full((height, width), value, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> int:
        return self.pixels.size

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Row-major 8-bit RGB raster; ``pixels`` has shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"rgb image needs shape (h, w, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("width and height must be >= 1")
        if arr.dtype != np.uint8 and (np.any(arr < 0) or np.any(arr > 255)):
            raise ValueError("channels must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))


def rgb_to_gray(img: RgbImage) -> GrayImage:
    """BT.601 luma, 0.299 R + 0.587 G + 0.114 B, rounded half up.

    Evaluated in integer thousandths so gray triples map to themselves exactly.
    """
    p = img.pixels.astype(np.int64)
    num = 299 * p[..., 0] + 587 * p[..., 1] + 114 * p[..., 2]
    return GrayImage(np.clip((num + 500) // 1000, 0, 255))


@dataclass(frozen=True)
class Histogram:
    bins: tuple[int, ...]

    def __post_init__(self):
        if len(self.bins) != 256:
            raise ValueError("histogram needs exactly 256 bins")

    @property
    def total(self) -> int:
        return sum(self.bins)

    def nonzero(self) -> list[int]:
        return [v for v, c in enumerate(self.bins) if c]

    def to_csv(self) -> str:
        lines = ["intensity,count"]
        lines += [f"{v},{c}" for v, c in enumerate(self.bins)]
        return "\n".join(lines) + "\n"


def histogram(img: GrayImage) -> Histogram:
    counts = np.bincount(img.pixels.ravel(), minlength=256)
    return Histogram(tuple(int(c) for c in counts))


# --- PNM ---------------------------------------------------------------------

_MAGICS = {b"P2": (1, False), b"P5": (1, True), b"P3": (3, False), b"P6": (3, True)}
_TOKEN = re.compile(rb"\S+")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last one.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise PnmFormatError("truncated header")
        if data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            pos = n if eol < 0 else eol + 1
            continue
        m = _TOKEN.match(data, pos)
        tok = m.group(0)
        if b"#" in tok:
            tok = tok[: tok.index(b"#")]
            pos += len(tok)
        else:
            pos = m.end()
        tokens.append(tok)
    if pos < n and data[pos : pos + 1].isspace():
        pos += 1
    return tokens, pos


def load_pnm(data: bytes) -> GrayImage | RgbImage:
    """Parse P2/P5 (gray) or P3/P6 (color) data with maxval 255."""
    magic = data[:2]
    if magic not in _MAGICS:
        raise PnmFormatError(f"unsupported magic {magic!r}")
    channels, binary = _MAGICS[magic]
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise PnmFormatError(f"malformed header: {exc}") from None
    if width <= 0 or height <= 0:
        raise PnmFormatError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PnmFormatError(f"maxval-unsupported: {maxval} (only 255 is accepted)")
    count = width * height * channels
    if binary:
        raw = data[pos : pos + count]
        if len(raw) < count:
            raise PnmFormatError(f"truncated pixel data: {len(raw)} of {count} bytes")
        values = np.frombuffer(raw, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:])
        words = body.split()
        if len(words) < count:
            raise PnmFormatError(f"truncated pixel data: {len(words)} of {count} samples")
        try:
            values = np.array([int(w) for w in words[:count]], dtype=np.int64)
        except ValueError as exc:
            raise PnmFormatError(f"bad sample: {exc}") from None
        if values.min() < 0 or values.max() > 255:
            raise PnmFormatError("sample outside [0, 255]")
    if channels == 1:
        return GrayImage(values.reshape(height, width))
    return RgbImage(values.reshape(height, width, 3))


def save_pgm(img: GrayImage) -> bytes:
    """Canonical binary PGM: ``P5\\n<w> <h>\\n255\\n`` then raw row-major bytes."""
    return f"P5\n{img.width} {img.height}\n255\n".encode("ascii") + img.pixels.tobytes()


def save_ppm(img: RgbImage) -> bytes:
    return f"P6\n{img.width} {img.height}\n255\n".encode("ascii") + img.pixels.tobytes()


def read_gray(path) -> GrayImage:
    """Load a PNM file, converting color images to gray."""
    with open(path, "rb") as fh:
        img = load_pnm(fh.read())
    return rgb_to_gray(img) if isinstance(img, RgbImage) else img


def write_pgm(path, img: GrayImage) -> None:
    with open(path, "wb") as fh:
        fh.write(save_pgm(img))
