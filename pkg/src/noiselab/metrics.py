"""Full-reference quality metrics (MSE, PSNR, AD, MD) and the Speckle Index.

Pairs are ordered ``(reference, test)``; AD is the signed mean of
``reference - test``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image_core import GrayImage

PEAK = 255


def _diff(a: GrayImage, b: GrayImage) -> np.ndarray:
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    return a.pixels.astype(np.int64) - b.pixels.astype(np.int64)


def mse(a: GrayImage, b: GrayImage) -> float:
    d = _diff(a, b)
    return int((d * d).sum()) / d.size


def psnr_from_mse(m: float) -> float:
    if m < 0:
        raise ValueError(f"MSE must be non-negative, got {m}")
    if m == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / m)


def psnr(a: GrayImage, b: GrayImage) -> float:
    """PSNR in dB with peak 255; ``math.inf`` for identical images."""
    return psnr_from_mse(mse(a, b))


def avg_diff(a: GrayImage, b: GrayImage) -> float:
    d = _diff(a, b)
    return int(d.sum()) / d.size


def max_diff(a: GrayImage, b: GrayImage) -> int:
    return int(np.abs(_diff(a, b)).max())


def speckle_index(img: GrayImage, w: int = 3) -> float:
    """Mean of local std/mean over w x w replicate-padded windows.

    Population standard deviation; windows whose mean is 0 are skipped and
    excluded from the average.
    """
    if isinstance(w, bool) or int(w) != w or w < 1 or w % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 1, got {w}")
    r = w // 2
    p = np.pad(img.pixels.astype(np.int64), r, mode="edge")
    c = [np.zeros((p.shape[0] + 1, p.shape[1] + 1), dtype=np.int64) for _ in range(2)]
    c[0][1:, 1:] = p.cumsum(0).cumsum(1)
    c[1][1:, 1:] = (p * p).cumsum(0).cumsum(1)
    s1, s2 = (q[w:, w:] - q[:-w, w:] - q[w:, :-w] + q[:-w, :-w] for q in c)
    n = w * w
    valid = s1 > 0
    if not valid.any():
        raise ValueError("speckle index undefined: every window has zero mean")
    mean = s1[valid] / n
    std = np.sqrt((n * s2[valid] - s1[valid] ** 2) / (n * n))
    return float(np.sum(std / mean) / valid.sum())


def format_float(x: float) -> str:
    """Shortest round-tripping decimal; ``inf`` for infinity."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr: float
    ad: float
    md: int
    si: float | None = None

    def csv_fields(self) -> list[str]:
        fields = [format_float(self.mse), format_float(self.psnr), format_float(self.ad), str(self.md)]
        if self.si is not None:
            fields.append(format_float(self.si))
        return fields


def quality_report(ref: GrayImage, test: GrayImage, si_window: int | None = None) -> QualityReport:
    m = mse(ref, test)
    si = speckle_index(test, si_window) if si_window else None
    return QualityReport(m, psnr_from_mse(m), avg_diff(ref, test), max_diff(ref, test), si)
