"""Synthetic fringe patterns with analytically known phase and ground truth.

Fringe model: I(x, y) = cos(phi_obj + phi_carrier) with uniform background and
unit amplitude. Object phases come from random Gaussian bumps (training family),
the classic peaks surface, or blurred random-ellipse masks (generalization
families). All generation is seed-deterministic; per-item seeds derive from the
manifest base seed through SplitMix64.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .container import write_container
from .image import as_real_image, gaussian_blur, gradients
from .maps import OrientationMap, encode_orientation, orientation_from_gradients

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 output step; the documented seed-mixing function."""
    x = (x + GOLDEN64) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(base_seed: int, index: int) -> int:
    """Per-item seed: SplitMix64 of base_seed xor (index+1)*golden ratio."""
    return splitmix64((base_seed ^ (((index + 1) * GOLDEN64) & MASK64)) & MASK64)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gaussian_samples(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via Box-Muller over the generator's uniform stream."""
    n = int(np.prod(shape))
    pairs = (n + 1) // 2
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    u1 = np.maximum(u1, np.finfo(np.float64).tiny)  # guard log(0)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([radius * np.cos(2.0 * np.pi * u2),
                        radius * np.sin(2.0 * np.pi * u2)])
    return z[:n].reshape(shape)


@dataclass(frozen=True)
class CarrierSpec:
    """Carrier fringes of period T pixels and azimuth theta in [0, pi)."""

    period_T: float
    theta: float

    def __post_init__(self):
        if not self.period_T > 2:
            raise ValueError("carrier period must exceed 2 px (Nyquist)")
        if not (0 <= self.theta < np.pi):
            raise ValueError("theta must lie in [0, pi)")


@dataclass(frozen=True)
class GaussianKernelSpec:
    """One object-phase bump: center (cx, cy) px, width sigma px, signed amplitude rad."""

    cx: float
    cy: float
    sigma: float
    amplitude: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def render_gaussian_kernels(shape, kernels) -> np.ndarray:
    """Sum of A_k * exp(-((x-cx)^2 + (y-cy)^2) / (2*sigma_k^2)) over the grid."""
    rows, cols = shape
    y, x = np.mgrid[0:rows, 0:cols].astype(np.float64)
    phase = np.zeros((rows, cols))
    for k in kernels:
        if not (0 <= k.cx <= cols - 1 and 0 <= k.cy <= rows - 1):
            raise ValueError(f"kernel center ({k.cx}, {k.cy}) outside image bounds")
        phase += k.amplitude * np.exp(
            -((x - k.cx) ** 2 + (y - k.cy) ** 2) / (2.0 * k.sigma**2)
        )
    return phase


def gen_carrier(shape, carrier: CarrierSpec) -> np.ndarray:
    """phi_carrier(x, y) = x*cos(theta)*2*pi/T + y*sin(theta)*2*pi/T."""
    rows, cols = shape
    y, x = np.mgrid[0:rows, 0:cols].astype(np.float64)
    k = 2.0 * np.pi / carrier.period_T
    return x * np.cos(carrier.theta) * k + y * np.sin(carrier.theta) * k


def gen_object_phase_gaussians(
    shape,
    seed: int,
    kernel_count_range=(1, 50),
    sigma_range=None,
    amplitude_range=(-8.0, 8.0),
) -> np.ndarray:
    """Sum of random 2D Gaussian bumps: A_k * exp(-((x-cx)^2+(y-cy)^2)/(2*sigma^2)).

    Defaults: count uniform in [1, 50], sigma in [5%, 25%] of min(rows, cols),
    amplitude in [-8, 8] rad, centers uniform inside the image.
    """
    rows, cols = shape
    if sigma_range is None:
        m = min(rows, cols)
        sigma_range = (0.05 * m, 0.25 * m)
    rng = make_rng(seed)
    lo, hi = kernel_count_range
    count = int(rng.integers(lo, hi + 1))
    kernels = [
        GaussianKernelSpec(
            cx=rng.uniform(0, cols - 1),
            cy=rng.uniform(0, rows - 1),
            sigma=rng.uniform(*sigma_range),
            amplitude=rng.uniform(*amplitude_range),
        )
        for _ in range(count)
    ]
    return render_gaussian_kernels(shape, kernels)


def peaks_surface(size: int) -> np.ndarray:
    """The classic peaks surface on X, Y in [-3, 3] mapped linearly over the grid."""
    coords = np.linspace(-3.0, 3.0, size)
    x, y = np.meshgrid(coords, coords)
    return (
        3.0 * (1.0 - x) ** 2 * np.exp(-(x**2) - (y + 1.0) ** 2)
        - 10.0 * (x / 5.0 - x**3 - y**5) * np.exp(-(x**2) - y**2)
        - (1.0 / 3.0) * np.exp(-((x + 1.0) ** 2) - y**2)
    )


def gen_peaks_phase(size: int, coeff_a: float) -> np.ndarray:
    """Peaks surface scaled by coeff_a; the simulated-comparison object phase."""
    if coeff_a < 0:
        raise ValueError("coeff_a must be non-negative")
    return coeff_a * peaks_surface(size)


def gen_blob_mask_phase(shape, seed: int, amplitude: float) -> np.ndarray:
    """Blurred union of 1-5 random ellipses, scaled to [0, amplitude]."""
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    rows, cols = shape
    rng = make_rng(seed)
    count = int(rng.integers(1, 6))
    y, x = np.mgrid[0:rows, 0:cols].astype(np.float64)
    mask = np.zeros((rows, cols), dtype=bool)
    for _ in range(count):
        cx = rng.uniform(0.2 * cols, 0.8 * cols)
        cy = rng.uniform(0.2 * rows, 0.8 * rows)
        ax = rng.uniform(0.1 * cols, 0.3 * cols)
        ay = rng.uniform(0.1 * rows, 0.3 * rows)
        angle = rng.uniform(0, np.pi)
        dx, dy = x - cx, y - cy
        u = dx * np.cos(angle) + dy * np.sin(angle)
        v = -dx * np.sin(angle) + dy * np.cos(angle)
        mask |= (u / ax) ** 2 + (v / ay) ** 2 <= 1.0
    blurred = gaussian_blur(mask.astype(np.float64), sigma=3.0)
    top = blurred.max()
    if top <= 0:
        return np.zeros((rows, cols))
    return amplitude * blurred / top


def render_fringe(phase: np.ndarray) -> np.ndarray:
    """I = cos(phase); values in [-1, 1]."""
    return np.cos(as_real_image(phase))


def add_gaussian_noise(img: np.ndarray, std: float, seed: int) -> np.ndarray:
    """i.i.d. zero-mean Gaussian noise; std = 0 returns the input bit-exactly."""
    if std < 0:
        raise ValueError("std must be non-negative")
    img = as_real_image(img)
    if std == 0:
        return img
    rng = make_rng(seed)
    return img + std * gaussian_samples(rng, img.shape)


def ground_truth_orientation(phase: np.ndarray) -> OrientationMap:
    """FO = atan2(dphi/dx, dphi/dy) mod pi from finite-difference phase gradients."""
    g = gradients(phase)
    return orientation_from_gradients(g.gx, g.gy)


def ground_truth_direction(phase: np.ndarray) -> np.ndarray:
    """beta = atan2(dphi/dx, dphi/dy) mod 2*pi (same argument order, full circle)."""
    g = gradients(phase)
    return np.mod(np.arctan2(g.gx, g.gy), 2.0 * np.pi)


# --------------------------------------------------------------------------
# Seeded dataset generation


@dataclass
class DatasetManifest:
    """Reproducible description of a simulated fringe corpus.

    Regenerating from the manifest is byte-identical within one implementation;
    per-item seeds derive from base_seed via the documented SplitMix64 mixing.
    """

    base_seed: int
    count: int
    rows: int = 64
    cols: int = 64
    kernel_count_range: tuple = (1, 50)
    sigma_range: tuple | None = None  # px; defaults to [5%, 25%] of min(rows, cols)
    amplitude_range: tuple = (-8.0, 8.0)  # rad
    period_range: tuple = (8.0, 32.0)  # px
    theta_range: tuple = (0.0, np.pi)  # rad
    noise_std: float = 0.0
    items: list = field(default_factory=list)

    def __post_init__(self):
        if self.count <= 0:
            raise ValueError("count must be positive")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        lo, hi = self.kernel_count_range
        if not (0 <= lo <= hi <= 50):
            raise ValueError("kernel_count_range must sit inside [0, 50]")
        if not self.items:
            self.items = [
                {
                    "index": i,
                    "seed": derive_seed(self.base_seed, i),
                    "fringe": f"item_{i:04d}_fringe.fpai",
                    "encoding": f"item_{i:04d}_encoding.fpai",
                    "fo": f"item_{i:04d}_fo.fpai",
                }
                for i in range(self.count)
            ]

    def to_json(self) -> dict:
        return {
            "format": "fringeproc-dataset",
            "version": 1,
            "base_seed": self.base_seed,
            "count": self.count,
            "rows": self.rows,
            "cols": self.cols,
            "kernel_count_range": list(self.kernel_count_range),
            "sigma_range": list(self.sigma_range) if self.sigma_range else None,
            "amplitude_range": list(self.amplitude_range),
            "period_range": list(self.period_range),
            "theta_range": list(self.theta_range),
            "noise_std": self.noise_std,
            "items": self.items,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DatasetManifest":
        if data.get("format") != "fringeproc-dataset":
            raise ValueError("not a dataset manifest")
        return cls(
            base_seed=data["base_seed"],
            count=data["count"],
            rows=data["rows"],
            cols=data["cols"],
            kernel_count_range=tuple(data["kernel_count_range"]),
            sigma_range=tuple(data["sigma_range"]) if data["sigma_range"] else None,
            amplitude_range=tuple(data["amplitude_range"]),
            period_range=tuple(data["period_range"]),
            theta_range=tuple(data["theta_range"]),
            noise_std=data["noise_std"],
            items=data["items"],
        )


def simulate_item(manifest: DatasetManifest, index: int):
    """Generate one (fringe, encoding, orientation) triple from its derived seed.

    Draw order from the item RNG is fixed: carrier period, carrier azimuth,
    object-phase kernels, then (optionally) noise.
    """
    item_seed = manifest.items[index]["seed"]
    rng = make_rng(item_seed)
    period = rng.uniform(*manifest.period_range)
    theta = rng.uniform(*manifest.theta_range)
    shape = (manifest.rows, manifest.cols)
    phase = gen_carrier(shape, CarrierSpec(period_T=period, theta=theta))
    phase += gen_object_phase_gaussians(
        shape,
        seed=splitmix64(item_seed),
        kernel_count_range=manifest.kernel_count_range,
        sigma_range=manifest.sigma_range,
        amplitude_range=manifest.amplitude_range,
    )
    fringe = render_fringe(phase)
    if manifest.noise_std > 0:
        fringe = add_gaussian_noise(fringe, manifest.noise_std,
                                    seed=splitmix64(item_seed ^ 1))
    fo = ground_truth_orientation(phase)
    enc = encode_orientation(fo)
    return fringe, enc, fo, {"period_T": period, "theta": theta}


def make_dataset(manifest: DatasetManifest, out_dir) -> Path:
    """Write the corpus described by the manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for item in manifest.items:
        i = item["index"]
        fringe, enc, fo, params = simulate_item(manifest, i)
        common = {"seed": item["seed"], "params": params}
        write_container(out_dir / item["fringe"], fringe,
                        meta={"kind": "fringe", **common})
        write_container(out_dir / item["encoding"], enc.to_array(),
                        meta={"kind": "encoding", **common})
        write_container(out_dir / item["fo"], fo.angles,
                        meta={"kind": "orientation", **common})
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_json(), fh, indent=2)
        fh.write("\n")
    return manifest_path


def load_manifest(path) -> DatasetManifest:
    with open(path, encoding="utf-8") as fh:
        return DatasetManifest.from_json(json.load(fh))
