"""Haar-sign block iris codes and masked fractional hamming distance.

The encoder is a minimal wavelet stand-in, not a full iris pipeline: the
image is tiled into ``rows x cols`` blocks and each block contributes the signs
of its one-level Haar horizontal and vertical details. A zero detail has no
sign and is masked out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_core import GrayImage
from .noise import GammaSpeckle, Gaussian, Impulse, NoiseSpec, SpeckleMultiplicative, Uniform, apply_noise


@dataclass(frozen=True, eq=False)
class IrisCode:
    bits: np.ndarray
    mask: np.ndarray
    grid: tuple[int, int]

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8).ravel()
        mask = np.asarray(self.mask, dtype=np.uint8).ravel()
        if bits.shape != mask.shape:
            raise ValueError("bits and mask must have the same length")
        if bits.size != 2 * self.grid[0] * self.grid[1]:
            raise ValueError(f"code length {bits.size} does not match grid {self.grid}")
        if np.any(bits > 1) or np.any(mask > 1):
            raise ValueError("bits and mask must be binary")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "mask", mask)

    def __eq__(self, other):
        if not isinstance(other, IrisCode):
            return NotImplemented
        return (self.grid == other.grid and np.array_equal(self.bits, other.bits)
                and np.array_equal(self.mask, other.mask))

    def __len__(self):
        return self.bits.size


def encode(img: GrayImage, rows: int, cols: int) -> IrisCode:
    if rows < 1 or cols < 1:
        raise ValueError(f"grid must be at least 1x1, got {rows}x{cols}")
    if rows > img.height or cols > img.width:
        raise ValueError(f"grid {rows}x{cols} larger than image {img.width}x{img.height}")
    bh, bw = img.height // rows, img.width // cols
    blocks = (img.pixels[: rows * bh, : cols * bw].astype(np.int64)
              .reshape(rows, bh, cols, bw).transpose(0, 2, 1, 3))
    hw, hh = bw // 2, bh // 2
    # odd block sizes leave the middle column/row out of both halves
    horiz = blocks[..., :hw].sum(axis=(2, 3)) - blocks[..., bw - hw:].sum(axis=(2, 3))
    vert = blocks[:, :, :hh, :].sum(axis=(2, 3)) - blocks[:, :, bh - hh:, :].sum(axis=(2, 3))
    detail = np.stack([horiz, vert], axis=-1).ravel()
    return IrisCode((detail >= 0).astype(np.uint8), (detail != 0).astype(np.uint8), (rows, cols))


def hamming_distance(a: IrisCode, b: IrisCode) -> float:
    """Disagreeing bits over jointly valid bits."""
    if a.grid != b.grid or len(a) != len(b):
        raise ValueError(f"code mismatch: grid {a.grid} vs {b.grid}")
    valid = (a.mask & b.mask).astype(bool)
    n = int(valid.sum())
    if n == 0:
        raise ValueError("no jointly valid bits to compare")
    return int(((a.bits ^ b.bits).astype(bool) & valid).sum()) / n


@dataclass(frozen=True)
class SweepRow:
    level: float
    mean_hd: float
    min_hd: float
    max_hd: float


def noise_at_level(kind: str, level: float) -> NoiseSpec | None:
    """Map a sweep level to a noise spec; level 0 means no noise (None).

    Levels are density (salt-pepper), variance (gaussian, speckle), half-width
    of a zero-centred interval (uniform), or Erlang scale at shape 1
    (gamma-speckle).
    """
    if level < 0:
        raise ValueError(f"noise level must be non-negative, got {level}")
    if level == 0:
        return None
    if kind == "salt-pepper":
        return Impulse(level)
    if kind == "gaussian":
        return Gaussian(0.0, level)
    if kind == "uniform":
        return Uniform(-level, level)
    if kind == "speckle":
        return SpeckleMultiplicative(level)
    if kind == "gamma-speckle":
        return GammaSpeckle(1, level)
    raise ValueError(f"unknown noise kind {kind!r}")


def noise_hd_sweep(img: GrayImage, kind: str, levels, seeds, grid: tuple[int, int] = (16, 16)) -> list[SweepRow]:
    """Hamming distance between the clean code and noisy codes, per level.

    Each seed is reused across levels so the sweep compares levels on common
    random numbers.
    """
    levels, seeds = list(levels), list(seeds)
    if not levels or not seeds:
        raise ValueError("levels and seeds must be non-empty")
    clean = encode(img, *grid)
    rows = []
    for level in levels:
        spec = noise_at_level(kind, level)
        hds = []
        for seed in seeds:
            noisy = img if spec is None else apply_noise(img, spec, seed)
            hds.append(hamming_distance(clean, encode(noisy, *grid)))
        rows.append(SweepRow(level, float(np.mean(hds)), min(hds), max(hds)))
    return rows


def sweep_csv(rows: list[SweepRow]) -> str:
    lines = ["level,mean_hd,min_hd,max_hd"]
    lines += [f"{r.level!r},{r.mean_hd!r},{r.min_hd!r},{r.max_hd!r}" for r in rows]
    return "\n".join(lines) + "\n"
