"""Seeded synthesis of impulse, Gaussian, uniform and speckle noise.

All parameters are in gray levels (0-255 domain). Every generator draws from a
fresh :class:`~noiselab.rng.SplitMix64` stream seeded with ``seed`` and assigns
samples to pixels in row-major order, so ``(image, parameters, seed)`` fully
determines the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .image_core import GrayImage, to_uint8
from .rng import SplitMix64


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _check_nonneg(name: str, value: float) -> None:
    if not value >= 0.0:
        raise ValueError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class Impulse:
    density: float
    salt_ratio: float = 0.5

    def __post_init__(self):
        _check_fraction("density", self.density)
        _check_fraction("salt_ratio", self.salt_ratio)


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    variance: float = 0.0

    def __post_init__(self):
        _check_nonneg("variance", self.variance)


@dataclass(frozen=True)
class Uniform:
    low: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError(f"uniform bounds need low <= high, got [{self.low}, {self.high}]")

    @property
    def mean(self) -> float:
        return (self.low + self.high) / 2

    @property
    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12


@dataclass(frozen=True)
class SpeckleMultiplicative:
    variance: float = 0.04

    def __post_init__(self):
        _check_nonneg("variance", self.variance)


@dataclass(frozen=True)
class GammaSpeckle:
    shape: int = 1
    scale: float = 0.1

    def __post_init__(self):
        if isinstance(self.shape, bool) or int(self.shape) != self.shape or self.shape < 1:
            raise ValueError(f"shape must be an integer >= 1, got {self.shape}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")


NoiseSpec = Union[Impulse, Gaussian, Uniform, SpeckleMultiplicative, GammaSpeckle]


def add_salt_pepper(img: GrayImage, d: float, salt_ratio: float = 0.5, seed: int = 0) -> GrayImage:
    """Bipolar impulse noise: 255 with prob. d*salt_ratio, 0 with prob. d*(1-salt_ratio).

    One uniform ``u`` per pixel: ``u < d*salt_ratio`` is salt, ``u < d`` pepper.
    """
    _check_fraction("density", d)
    _check_fraction("salt_ratio", salt_ratio)
    u = SplitMix64(seed).uniform(img.size).reshape(img.pixels.shape)
    out = img.pixels.copy()
    out[u < d] = 0
    out[u < d * salt_ratio] = 255
    return GrayImage(out)


def add_gaussian(img: GrayImage, mean: float = 0.0, variance: float = 0.0, seed: int = 0) -> GrayImage:
    _check_nonneg("variance", variance)
    n = SplitMix64(seed).normal(img.size, mean, math.sqrt(variance))
    return GrayImage(to_uint8(img.pixels + n.reshape(img.pixels.shape)))


def add_uniform(img: GrayImage, a: float = 0.0, b: float = 0.0, seed: int = 0) -> GrayImage:
    if a > b:
        raise ValueError(f"uniform bounds need a <= b, got [{a}, {b}]")
    u = a + (b - a) * SplitMix64(seed).uniform(img.size)
    return GrayImage(to_uint8(img.pixels + u.reshape(img.pixels.shape)))


def add_speckle(img: GrayImage, v: float = 0.04, seed: int = 0) -> GrayImage:
    """Multiplicative speckle ``in + n*in`` with zero-mean uniform ``n`` of variance ``v``."""
    _check_nonneg("variance", v)
    half = math.sqrt(3.0 * v)
    n = -half + 2.0 * half * SplitMix64(seed).uniform(img.size)
    f = img.pixels.astype(np.float64)
    return GrayImage(to_uint8(f + n.reshape(f.shape) * f))


def _erlang(stream: SplitMix64, shape: int, scale: float, n: int) -> np.ndarray:
    # sample i is the sum of draws i*shape .. i*shape+shape-1
    return stream.exponential(n * shape, scale).reshape(n, shape).sum(axis=1)


def sample_gamma(shape: int, scale: float, seed: int = 0, n: int | None = None):
    """Erlang(shape, scale) draws as sums of ``shape`` exponentials.

    Returns a float when ``n`` is None, otherwise an array of ``n`` draws.
    """
    GammaSpeckle(shape, scale)  # validates
    draws = _erlang(SplitMix64(seed), int(shape), float(scale), 1 if n is None else n)
    return float(draws[0]) if n is None else draws


def add_gamma_speckle(img: GrayImage, shape: int = 1, scale: float = 0.1, seed: int = 0) -> GrayImage:
    """Multiplicative speckle driven by Erlang draws.

    The multiplier is centred, ``n = g - shape*scale``, so ``out = in + n*in``
    has zero-mean noise with variance ``shape * scale**2 * in**2``.
    """
    GammaSpeckle(shape, scale)
    g = _erlang(SplitMix64(seed), int(shape), float(scale), img.size)
    n = (g - shape * scale).reshape(img.pixels.shape)
    f = img.pixels.astype(np.float64)
    return GrayImage(to_uint8(f + n * f))


def apply_noise(img: GrayImage, spec: NoiseSpec, seed: int = 0) -> GrayImage:
    if isinstance(spec, Impulse):
        return add_salt_pepper(img, spec.density, spec.salt_ratio, seed)
    if isinstance(spec, Gaussian):
        return add_gaussian(img, spec.mean, spec.variance, seed)
    if isinstance(spec, Uniform):
        return add_uniform(img, spec.low, spec.high, seed)
    if isinstance(spec, SpeckleMultiplicative):
        return add_speckle(img, spec.variance, seed)
    if isinstance(spec, GammaSpeckle):
        return add_gamma_speckle(img, spec.shape, spec.scale, seed)
    raise TypeError(f"unknown noise spec {spec!r}")


NOISE_KINDS = ("salt-pepper", "gaussian", "uniform", "speckle", "gamma-speckle")


def make_noise_spec(kind: str, *, density=None, salt_ratio=None, mean=None, variance=None,
                    low=None, high=None, shape=None, scale=None, normalized=False) -> NoiseSpec:
    """Build a spec from CLI/config style parameters.

    With ``normalized`` the additive means, bounds and variances are taken in
    [0, 1] intensity units and rescaled by 255 (means, bounds) or 255**2
    (variances). Speckle variance is dimensionless and never rescaled.
    """
    k = 255.0 if normalized else 1.0
    if kind == "salt-pepper":
        return Impulse(0.05 if density is None else density, 0.5 if salt_ratio is None else salt_ratio)
    if kind == "gaussian":
        return Gaussian((mean or 0.0) * k, (100.0 / k**2 if variance is None else variance) * k * k)
    if kind == "uniform":
        lo = -20.0 / k if low is None else low
        hi = 20.0 / k if high is None else high
        return Uniform(lo * k, hi * k)
    if kind == "speckle":
        return SpeckleMultiplicative(0.04 if variance is None else variance)
    if kind == "gamma-speckle":
        return GammaSpeckle(1 if shape is None else shape, 0.1 if scale is None else scale)
    raise ValueError(f"unknown noise kind {kind!r}; choose from {', '.join(NOISE_KINDS)}")
