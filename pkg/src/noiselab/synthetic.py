"""Deterministic synthetic test images.

Real iris databases cannot be bundled, so tests and demos use a procedurally
drawn eye: skin, sclera, a textured iris annulus, a dark pupil and a specular
highlight.
"""

from __future__ import annotations

import numpy as np

from .image_core import GrayImage, to_uint8


def synthetic_eye(width: int = 320, height: int = 280, variant: int = 0) -> GrayImage:
    """Eye-like grayscale image; ``variant`` shifts the geometry and texture phase."""
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    cx = width / 2 + 7 * np.sin(1.3 * variant)
    cy = height / 2 + 5 * np.cos(0.7 * variant)
    s = min(width, height)
    dx, dy = x - cx, y - cy
    r = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)

    img = 150 + 25 * (y / height) + 10 * np.sin(x / 23.0 + variant)

    sclera = (dx / (0.46 * width)) ** 2 + (dy / (0.27 * height)) ** 2 <= 1
    img = np.where(sclera, 205 + 8 * np.cos(dx / 40.0), img)

    r_iris, r_pupil = 0.24 * s + variant % 3, 0.09 * s
    iris = r <= r_iris
    texture = (
        95
        + 28 * np.sin(14 * theta + 0.25 * r + variant)
        + 16 * np.cos(0.55 * r - 3 * theta)
        + 10 * np.sin(31 * theta)
        - 30 * (r / r_iris) ** 4
    )
    img = np.where(iris, texture, img)
    img = np.where(r <= r_pupil, 28 + 4 * np.cos(theta), img)

    glint = np.hypot(dx + 0.35 * r_pupil, dy + 0.35 * r_pupil) <= 0.25 * r_pupil
    img = np.where(glint, 250, img)

    # eyelid shading above and below the sclera
    lid = np.clip(np.abs(dy) / (0.5 * height), 0, 1) ** 3
    img = img * (1 - 0.35 * lid * ~sclera)
    return GrayImage(to_uint8(img))
