"""Angle-map types: modulo-pi orientation, modulo-2pi direction, sin/cos encoding.

Orientation angles follow the repo convention FO = atan2(d(phi)/dx, d(phi)/dy)
reduced into [0, pi); direction keeps the full circle [0, 2*pi). Degenerate
pixels (vanishing gradient) carry a validity mask instead of an arbitrary angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEGENERATE_GRADIENT_EPS = 1e-9
DECODE_MAGNITUDE_EPS = 1e-6


@dataclass(frozen=True)
class OrientationMap:
    """Per-pixel fringe orientation in [0, pi) with a validity mask."""

    angles: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        if self.angles.shape != self.valid.shape:
            raise ValueError("angles and validity mask shapes differ")

    @property
    def shape(self):
        return self.angles.shape


@dataclass(frozen=True)
class OrientationEncoding:
    """Two-channel (sin 2FO, cos 2FO) field, the network target/output."""

    sin2: np.ndarray
    cos2: np.ndarray

    def __post_init__(self):
        if self.sin2.shape != self.cos2.shape:
            raise ValueError("channel shapes differ")

    @property
    def shape(self):
        return self.sin2.shape

    def to_array(self) -> np.ndarray:
        """Stack as (2, rows, cols), channel order (sin, cos)."""
        return np.stack([self.sin2, self.cos2])

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "OrientationEncoding":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[0] != 2:
            raise ValueError(f"expected a (2, rows, cols) stack, got {arr.shape}")
        return cls(sin2=arr[0], cos2=arr[1])


def encode_orientation(fo: OrientationMap) -> OrientationEncoding:
    """(sin 2FO, cos 2FO) per pixel; invalid pixels encode as (0, 1)."""
    doubled = 2.0 * fo.angles
    sin2 = np.where(fo.valid, np.sin(doubled), 0.0)
    cos2 = np.where(fo.valid, np.cos(doubled), 1.0)
    return OrientationEncoding(sin2=sin2, cos2=cos2)


def decode_orientation(enc: OrientationEncoding) -> OrientationMap:
    """FO = atan2(s, c)/2 mapped into [0, pi).

    Channels need not be unit norm (network outputs are approximate); pixels
    with s^2 + c^2 below the magnitude floor are marked invalid.
    """
    magnitude_sq = enc.sin2**2 + enc.cos2**2
    valid = magnitude_sq >= DECODE_MAGNITUDE_EPS
    angles = np.mod(0.5 * np.arctan2(enc.sin2, enc.cos2), np.pi)
    angles = np.where(valid, angles, 0.0)
    return OrientationMap(angles=angles, valid=valid)


def orientation_from_gradients(gx: np.ndarray, gy: np.ndarray) -> OrientationMap:
    """atan2(gx, gy) mod pi; pixels with |gx| + |gy| below the floor are invalid.

    Reduces through the mod-2*pi direction value so orientation and direction
    maps computed from the same gradients agree bit-exactly after mod pi.
    """
    valid = (np.abs(gx) + np.abs(gy)) >= DEGENERATE_GRADIENT_EPS
    angles = np.mod(np.mod(np.arctan2(gx, gy), 2.0 * np.pi), np.pi)
    angles = np.where(valid, angles, 0.0)
    return OrientationMap(angles=angles, valid=valid)


def circular_orientation_error(a, b) -> np.ndarray:
    """Pointwise distance between mod-pi angles, in [0, pi/2]."""
    d = np.mod(np.asarray(a) - np.asarray(b), np.pi)
    return np.minimum(d, np.pi - d)


def circular_direction_error(a, b) -> np.ndarray:
    """Pointwise distance between mod-2pi angles, in [0, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b), 2.0 * np.pi)
    return np.minimum(d, 2.0 * np.pi - d)
