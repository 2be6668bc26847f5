"""Spatial denoising filters: median, arithmetic mean, Gaussian, adaptive Wiener.

Each filter takes an odd window ``w`` and a border policy, ``"replicate"``
(clamp coordinates) or ``"zero"`` (pad with 0; padded zeros count as window
members). Results are rounded half away from zero once, at the end.

:func:`reference_filter` is a deliberately naive per-pixel loop over the same
contract, kept as the test oracle for the vectorized paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image_core import GrayImage, to_uint8

BORDERS = ("replicate", "zero")
FILTER_KINDS = ("mean", "median", "gaussian", "wiener")


def _check_window(w: int) -> None:
    if isinstance(w, bool) or int(w) != w or w < 1 or w % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 1, got {w}")


def _check_border(border: str) -> None:
    if border not in BORDERS:
        raise ValueError(f"border must be one of {BORDERS}, got {border!r}")


def _check_sigma(sigma: float) -> None:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    window: int = 3
    sigma: float = 0.5
    noise_variance: float | None = None
    border: str = "replicate"

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}; choose from {', '.join(FILTER_KINDS)}")
        _check_window(self.window)
        _check_border(self.border)
        _check_sigma(self.sigma)
        if self.noise_variance is not None and not self.noise_variance >= 0:
            raise ValueError(f"noise variance must be non-negative, got {self.noise_variance}")


@dataclass(frozen=True, eq=False)
class Kernel:
    size: int
    weights: np.ndarray


def _pad(arr: np.ndarray, r: int, border: str) -> np.ndarray:
    if border == "replicate":
        return np.pad(arr, r, mode="edge")
    return np.pad(arr, r, mode="constant", constant_values=0)


def _box_sums(arr: np.ndarray, w: int, border: str) -> tuple[np.ndarray, np.ndarray]:
    """Exact integer window sums of values and squared values."""
    p = _pad(arr.astype(np.int64), w // 2, border)
    out = []
    for q in (p, p * p):
        c = np.zeros((q.shape[0] + 1, q.shape[1] + 1), dtype=np.int64)
        c[1:, 1:] = q.cumsum(0).cumsum(1)
        out.append(c[w:, w:] - c[:-w, w:] - c[w:, :-w] + c[:-w, :-w])
    return out[0], out[1]


def median_filter(img: GrayImage, w: int = 3, border: str = "replicate") -> GrayImage:
    _check_window(w)
    _check_border(border)
    if w == 1:
        return img
    h, wd = img.pixels.shape
    win = sliding_window_view(_pad(img.pixels, w // 2, border), (w, w)).reshape(h, wd, w * w)
    k = (w * w) // 2
    return GrayImage(np.partition(win, k, axis=-1)[..., k])


def mean_filter(img: GrayImage, w: int = 3, border: str = "replicate") -> GrayImage:
    _check_window(w)
    _check_border(border)
    s, _ = _box_sums(img.pixels, w, border)
    n = w * w
    # round(s / n) half up, in integers
    return GrayImage((2 * s + n) // (2 * n))


def gaussian_profile(sigma: float, n: int) -> np.ndarray:
    """Normalized 1-D Gaussian taps exp(-x^2 / 2 sigma^2), x = -(n-1)/2 .. (n-1)/2."""
    _check_sigma(sigma)
    _check_window(n)
    x = np.arange(n, dtype=np.float64) - (n - 1) / 2
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def gaussian_kernel(sigma: float, n: int) -> Kernel:
    """2-D kernel with weights proportional to exp(-(x^2+y^2) / 2 sigma^2).

    Built as the outer product of the normalized 1-D profile, which is the
    same normalized surface since the exponential factorizes.
    """
    p = gaussian_profile(sigma, n)
    return Kernel(n, np.outer(p, p))


def gaussian_filter_float(img: GrayImage, sigma: float = 0.5, n: int = 3,
                          border: str = "replicate") -> np.ndarray:
    """Unrounded separable Gaussian smoothing (rows, then columns)."""
    _check_border(border)
    p = gaussian_profile(sigma, n)
    h, w = img.pixels.shape
    padded = _pad(img.pixels.astype(np.float64), n // 2, border)
    rows = np.zeros((padded.shape[0], w))
    for i, c in enumerate(p):
        rows += c * padded[:, i : i + w]
    out = np.zeros((h, w))
    for i, c in enumerate(p):
        out += c * rows[i : i + h, :]
    return out


def gaussian_filter(img: GrayImage, sigma: float = 0.5, n: int = 3,
                    border: str = "replicate") -> GrayImage:
    return GrayImage(to_uint8(gaussian_filter_float(img, sigma, n, border)))


def estimate_noise_variance(img: GrayImage, w: int = 3, border: str = "replicate") -> float:
    """Global mean of the local window variances."""
    _check_window(w)
    _check_border(border)
    s1, s2 = _box_sums(img.pixels, w, border)
    n = w * w
    num = n * s2 - s1 * s1
    return int(num.sum()) / (n * n * img.size)


def wiener_filter(img: GrayImage, w: int = 3, noise_variance: float | None = None,
                  border: str = "replicate") -> GrayImage:
    """Locally adaptive Wiener smoothing.

    ``out = m + s/(s + nv) * (g - m)`` with local mean ``m``, local population
    variance ``v``, ``s = max(0, v - nv)`` and 0/0 taken as 0. ``nv`` defaults to
    :func:`estimate_noise_variance`.
    """
    _check_window(w)
    _check_border(border)
    if noise_variance is None:
        noise_variance = estimate_noise_variance(img, w, border)
    elif not noise_variance >= 0:
        raise ValueError(f"noise variance must be non-negative, got {noise_variance}")
    nv = float(noise_variance)
    s1, s2 = _box_sums(img.pixels, w, border)
    n = w * w
    mean = s1 / n
    var = (n * s2 - s1 * s1) / (n * n)
    sig = np.maximum(0.0, var - nv)
    denom = sig + nv
    gain = np.divide(sig, denom, out=np.zeros_like(sig), where=denom > 0)
    return GrayImage(to_uint8(mean + gain * (img.pixels - mean)))


def apply_filter(img: GrayImage, spec: FilterSpec) -> GrayImage:
    if spec.kind == "median":
        return median_filter(img, spec.window, spec.border)
    if spec.kind == "mean":
        return mean_filter(img, spec.window, spec.border)
    if spec.kind == "gaussian":
        return gaussian_filter(img, spec.sigma, spec.window, spec.border)
    return wiener_filter(img, spec.window, spec.noise_variance, spec.border)


# --- naive oracle --------------------------------------------------------------

def _round_clamp(x: float) -> int:
    r = math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)
    return min(255, max(0, int(r)))


def _padded_rows(rows: list[list[int]], r: int, border: str) -> list[list[int]]:
    h, wd = len(rows), len(rows[0])
    out = []
    for yy in range(-r, h + r):
        if border == "replicate":
            src = rows[min(max(yy, 0), h - 1)]
            out.append([src[min(max(xx, 0), wd - 1)] for xx in range(-r, wd + r)])
        elif 0 <= yy < h:
            out.append([0] * r + rows[yy] + [0] * r)
        else:
            out.append([0] * (wd + 2 * r))
    return out


def _window(padded: list[list[int]], y: int, x: int, w: int) -> list[int]:
    return [v for row in padded[y : y + w] for v in row[x : x + w]]


def reference_filter(img: GrayImage, spec: FilterSpec) -> GrayImage:
    """Brute-force per-pixel implementation of every filter, for testing."""
    rows = img.pixels.tolist()
    h, wd = len(rows), len(rows[0])
    w, border = spec.window, spec.border
    n = w * w
    padded = _padded_rows(rows, w // 2, border)
    out = [[0] * wd for _ in range(h)]

    nv = spec.noise_variance
    if spec.kind == "wiener" and nv is None:
        total = 0
        for y in range(h):
            for x in range(wd):
                v = _window(padded, y, x, w)
                total += n * sum(t * t for t in v) - sum(v) ** 2
        nv = total / (n * n * h * wd)
    if spec.kind == "gaussian":
        # direct 2-D weights, normalized over the full surface
        r = w // 2
        raw = [math.exp(-(dx * dx + dy * dy) / (2.0 * spec.sigma ** 2))
               for dy in range(-r, r + 1) for dx in range(-r, r + 1)]
        total_w = sum(raw)
        weights = [c / total_w for c in raw]

    for y in range(h):
        for x in range(wd):
            v = _window(padded, y, x, w)
            if spec.kind == "median":
                out[y][x] = sorted(v)[n // 2]
            elif spec.kind == "mean":
                out[y][x] = _round_clamp(sum(v) / n)
            elif spec.kind == "gaussian":
                out[y][x] = _round_clamp(sum(c * t for c, t in zip(weights, v)))
            else:
                s1 = sum(v)
                s2 = sum(t * t for t in v)
                m = s1 / n
                var = (n * s2 - s1 * s1) / (n * n)
                sig = max(0.0, var - float(nv))
                denom = sig + float(nv)
                gain = sig / denom if denom > 0 else 0.0
                out[y][x] = _round_clamp(m + gain * (rows[y][x] - m))
    return GrayImage(np.array(out, dtype=np.uint8))


def reference_gaussian_float(img: GrayImage, sigma: float, n: int, border: str) -> np.ndarray:
    """Direct (non-separable) 2-D Gaussian convolution without rounding."""
    rows = img.pixels.tolist()
    k = gaussian_kernel(sigma, n).weights.ravel().tolist()
    h, wd = len(rows), len(rows[0])
    padded = _padded_rows(rows, n // 2, border)
    out = np.zeros((h, wd))
    for y in range(h):
        for x in range(wd):
            out[y, x] = sum(c * t for c, t in zip(k, _window(padded, y, x, n)))
    return out
