"""Dense-grid primitives: validation, finite differences, FFT contract, Gaussian blur.

Axis convention, fixed repo-wide: x is the column index (increasing rightward),
y is the row index (increasing downward). Arrays are indexed [y, x].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

MIN_ESTIMATOR_SIZE = 8


def as_real_image(values, min_size: int | None = None) -> np.ndarray:
    """Validate and return a float64 2D image.

    Rejects non-2D input and non-finite samples. ``min_size`` additionally
    enforces the minimum grid size required by the estimators.
    """
    img = np.asarray(values, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite samples")
    if min_size is not None and (img.shape[0] < min_size or img.shape[1] < min_size):
        raise ValueError(
            f"image {img.shape} smaller than required {min_size}x{min_size}"
        )
    return img


@dataclass(frozen=True)
class GradientPair:
    """Per-pixel spatial derivatives, same shape as the source image."""

    gx: np.ndarray  # d/dx, along columns
    gy: np.ndarray  # d/dy, along rows


def gradients(img: np.ndarray) -> GradientPair:
    """Central differences at interior pixels, one-sided at the first/last row/column.

    Matches np.gradient's stencil; output shape equals input shape so maps stay
    full-size.
    """
    img = as_real_image(img)
    gy, gx = np.gradient(img)
    return GradientPair(gx=gx, gy=gy)


def fft2(img: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2D DFT; DC at index (0, 0)."""
    return np.fft.fft2(np.asarray(img, dtype=np.complex128))


def ifft2(img: np.ndarray) -> np.ndarray:
    """Inverse 2D DFT normalized by 1/(rows*cols); exact round-trip with fft2."""
    return np.fft.ifft2(np.asarray(img, dtype=np.complex128))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Unit-sum 1D Gaussian truncated at +/- ceil(4*sigma)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    radius = int(np.ceil(4.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    return kernel / kernel.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian convolution with replicated edges.

    The kernel is truncated at +/- ceil(4*sigma) and renormalized to unit sum,
    so constant images pass through unchanged.
    """
    img = as_real_image(img)
    kernel = gaussian_kernel(sigma)
    out = ndimage.correlate1d(img, kernel, axis=0, mode="nearest")
    out = ndimage.correlate1d(out, kernel, axis=1, mode="nearest")
    return out
