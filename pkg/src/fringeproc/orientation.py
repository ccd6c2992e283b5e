"""Classical fringe-orientation estimation from intensity.

Two estimators share the same doubled-angle window averaging: the gradient
method (finite-difference intensity gradients) and the combined plane-fit /
gradient method (windowed least-squares plane fits supply the gradients).
Raw per-pixel arctangents are unstable near fringe extrema where gradients
vanish; averaging the doubled-angle components respects the mod-pi topology.

Both estimators expect prefiltered input (approximately zero mean, unit
amplitude); ``prefilter`` is the simplified bandpass/normalize stand-in used
throughout this repo.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import MIN_ESTIMATOR_SIZE, as_real_image, fft2, gaussian_blur, gradients
from .maps import OrientationMap

AVERAGED_MAGNITUDE_EPS = 1e-9
NORMALIZE_EPS = 1e-6


@dataclass(frozen=True)
class WindowSpec:
    """Square estimation window of side w pixels (w = 2 in the reference protocol)."""

    w: int = 2

    def __post_init__(self):
        if self.w < 2:
            raise ValueError("window side must be at least 2")

    def check_fits(self, shape) -> None:
        if self.w > min(shape) // 2:
            raise ValueError(f"window {self.w} too large for image {shape}")

    @property
    def lo(self) -> int:
        # offsets span [-lo, +hi]; even windows lean right/down
        return (self.w - 1) // 2

    @property
    def hi(self) -> int:
        return self.w // 2


def estimate_dominant_period(img: np.ndarray) -> float:
    """Period (px) of the strongest non-DC spectral component."""
    img = as_real_image(img, min_size=MIN_ESTIMATOR_SIZE)
    spectrum = np.abs(fft2(img - img.mean()))
    spectrum[0, 0] = 0.0
    i, j = np.unravel_index(int(np.argmax(spectrum)), spectrum.shape)
    fy = np.fft.fftfreq(img.shape[0])[i]
    fx = np.fft.fftfreq(img.shape[1])[j]
    f = float(np.hypot(fx, fy))
    if f <= 0:
        return float(min(img.shape)) / 4.0
    return 1.0 / f


def prefilter(
    img: np.ndarray,
    background_sigma: float | None = None,
    smooth_sigma: float = 0.5,
) -> np.ndarray:
    """Background removal + amplitude normalization + light denoise.

    s = img - background; s /= max(eps, blur(|s|, sigma) * pi/2) which is the
    local mean rectified amplitude of a sinusoid scaled back to its envelope;
    then a light Gaussian denoise. Output is approximately zero-mean with
    approximately unit amplitude.

    With an explicit ``background_sigma`` the background is
    gaussian_blur(img, background_sigma). The default ties the scale to twice
    the dominant fringe period; when that blur would not fit the grid
    (2*T > min(rows, cols)/8, the usual case on desk-scale images) the
    background degenerates to its large-sigma limit, the global mean, which
    avoids the boundary-replication dent the oversized blur would imprint.
    """
    img = as_real_image(img, min_size=MIN_ESTIMATOR_SIZE)
    if smooth_sigma <= 0:
        raise ValueError("smooth_sigma must be positive")
    cap = min(img.shape) / 8.0
    if background_sigma is None:
        scale = 2.0 * estimate_dominant_period(img)
        if scale <= cap:
            background = gaussian_blur(img, scale)
            envelope_sigma = scale
        else:
            background = np.full_like(img, img.mean())
            envelope_sigma = cap
    else:
        if background_sigma <= 0:
            raise ValueError("background_sigma must be positive")
        background = gaussian_blur(img, background_sigma)
        envelope_sigma = background_sigma
    s = img - background
    envelope = gaussian_blur(np.abs(s), envelope_sigma) * (np.pi / 2.0)
    s = s / np.maximum(NORMALIZE_EPS, envelope)
    return gaussian_blur(s, smooth_sigma)


def _window_bounds(n: int, win: WindowSpec):
    idx = np.arange(n)
    lo = np.clip(idx - win.lo, 0, n - 1)
    hi = np.clip(idx + win.hi, 0, n - 1)
    return lo, hi


def _box_sum(img: np.ndarray, win: WindowSpec) -> np.ndarray:
    """Sum of img over the w x w window centered at each pixel, clipped at borders."""
    rows, cols = img.shape
    padded = np.zeros((rows + 1, cols + 1))
    padded[1:, 1:] = np.cumsum(np.cumsum(img, axis=0), axis=1)
    r0, r1 = _window_bounds(rows, win)
    c0, c1 = _window_bounds(cols, win)
    r0 = r0[:, None]
    r1 = r1[:, None]
    c0 = c0[None, :]
    c1 = c1[None, :]
    return (
        padded[r1 + 1, c1 + 1]
        - padded[r0, c1 + 1]
        - padded[r1 + 1, c0]
        + padded[r0, c0]
    )


def _index_window_sums(n: int, win: WindowSpec):
    """Closed-form window sums of the index and its square along one axis."""
    lo, hi = _window_bounds(n, win)
    lo = lo.astype(np.float64)
    hi = hi.astype(np.float64)
    count = hi - lo + 1.0
    s1 = 0.5 * (lo + hi) * count
    cube = lambda v: v * (v + 1.0) * (2.0 * v + 1.0) / 6.0
    s2 = cube(hi) - cube(lo - 1.0)
    return count, s1, s2


def _orientation_from_averaged(gx, gy, win: WindowSpec) -> OrientationMap:
    """Box-average the doubled-angle gradient components and halve the angle.

    (gx^2 - gy^2, 2*gx*gy) is the doubled-angle vector of the gradient's angle
    from the x axis; after averaging, the halved angle converts to the repo's
    FO convention via FO = (pi/2 - alpha) mod pi.
    """
    count = _box_sum(np.ones_like(gx), win)
    c_avg = _box_sum(gx**2 - gy**2, win) / count
    s_avg = _box_sum(2.0 * gx * gy, win) / count
    valid = np.hypot(c_avg, s_avg) >= AVERAGED_MAGNITUDE_EPS
    alpha = 0.5 * np.arctan2(s_avg, c_avg)
    angles = np.mod(np.pi / 2.0 - alpha, np.pi)
    angles = np.where(valid, angles, 0.0)
    return OrientationMap(angles=angles, valid=valid)


def gradient_orientation(img: np.ndarray, win: WindowSpec = WindowSpec()) -> OrientationMap:
    """Orientation from window-averaged finite-difference intensity gradients."""
    img = as_real_image(img, min_size=MIN_ESTIMATOR_SIZE)
    win.check_fits(img.shape)
    g = gradients(img)
    return _orientation_from_averaged(g.gx, g.gy, win)


def plane_fit_gradients(img: np.ndarray, win: WindowSpec = WindowSpec()):
    """Least-squares fit I ~ p0 + p1*x + p2*y over each clipped window.

    Returns (p1, p2) maps. Windows whose clipped geometry makes the normal
    equations singular (single row/column remnants at borders) yield (0, 0).
    """
    img = as_real_image(img, min_size=MIN_ESTIMATOR_SIZE)
    win.check_fits(img.shape)
    rows, cols = img.shape
    y = np.arange(rows, dtype=np.float64)[:, None]
    x = np.arange(cols, dtype=np.float64)[None, :]

    n_r, sy1, sy2 = _index_window_sums(rows, win)
    n_c, sx1, sx2 = _index_window_sums(cols, win)
    n_r, sy1, sy2 = n_r[:, None], sy1[:, None], sy2[:, None]
    n_c, sx1, sx2 = n_c[None, :], sx1[None, :], sx2[None, :]

    # window sums of the coordinates, centered at each pixel
    count = n_r * n_c
    sx = sx1 * n_r - count * x
    sy = sy1 * n_c - count * y
    sxx = (sx2 - 2.0 * x * sx1) * n_r + count * x**2
    syy = (sy2 - 2.0 * y * sy1) * n_c + count * y**2
    sxy = (sx1 - n_c * x) * (sy1 - n_r * y)

    ti = _box_sum(img, win)
    tix = _box_sum(img * x, win) - x * ti
    tiy = _box_sum(img * y, win) - y * ti

    # Cramer's rule on the 3x3 normal equations [count sx sy; sx sxx sxy; sy sxy syy]
    det = (
        count * (sxx * syy - sxy**2)
        - sx * (sx * syy - sxy * sy)
        + sy * (sx * sxy - sxx * sy)
    )
    det_p1 = (
        count * (tix * syy - sxy * tiy)
        - ti * (sx * syy - sxy * sy)
        + sy * (sx * tiy - tix * sy)
    )
    det_p2 = (
        count * (sxx * tiy - tix * sxy)
        - sx * (sx * tiy - tix * sy)
        + ti * (sx * sxy - sxx * sy)
    )
    ok = np.abs(det) > 1e-12 * np.maximum(count, 1.0) ** 3
    safe = np.where(ok, det, 1.0)
    p1 = np.where(ok, det_p1 / safe, 0.0)
    p2 = np.where(ok, det_p2 / safe, 0.0)
    return p1, p2


def cpfg_orientation(img: np.ndarray, win: WindowSpec = WindowSpec()) -> OrientationMap:
    """Combined plane-fit/gradient orientation: plane-fit gradients, then the
    same doubled-angle window averaging as the gradient method."""
    p1, p2 = plane_fit_gradients(img, win)
    return _orientation_from_averaged(p1, p2, win)
