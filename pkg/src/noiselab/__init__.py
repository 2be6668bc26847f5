"""Seeded image noise synthesis, spatial denoising filters, quality metrics
and an iris-code hamming distance experiment."""

from .filters import (
    FilterSpec,
    Kernel,
    apply_filter,
    gaussian_filter,
    gaussian_kernel,
    mean_filter,
    median_filter,
    reference_filter,
    wiener_filter,
)
from .image_core import (
    GrayImage,
    Histogram,
    PnmFormatError,
    RgbImage,
    histogram,
    load_pnm,
    read_gray,
    rgb_to_gray,
    save_pgm,
    write_pgm,
)
from .iris import IrisCode, encode, hamming_distance, noise_hd_sweep
from .metrics import QualityReport, avg_diff, max_diff, mse, psnr, quality_report, speckle_index
from .noise import (
    GammaSpeckle,
    Gaussian,
    Impulse,
    SpeckleMultiplicative,
    Uniform,
    add_gamma_speckle,
    add_gaussian,
    add_salt_pepper,
    add_speckle,
    add_uniform,
    apply_noise,
    sample_gamma,
)

__version__ = "0.1.0"
