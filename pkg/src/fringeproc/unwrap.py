"""Reliability-sorted 2D phase unwrapping and the orientation-to-direction lift.

The unwrapper follows the region-merging recipe: pixel reliability is the
inverse of the summed squared wrapped second differences (horizontal, vertical
and both diagonals), edges between 4-neighbors carry the sum of their pixels'
reliabilities, and regions merge in decreasing edge reliability, shifting the
smaller region by the multiple of 2*pi that makes the joining pixels agree.
The result is normalized so the most reliable pixel keeps its input value.

A modulo-pi orientation map lifts to a modulo-2*pi direction map by doubling,
unwrapping, halving and reducing; the global pi branch stays inherently
ambiguous.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import NumericalError
from .maps import OrientationMap

TAU = 2.0 * np.pi


def _wrap(d: np.ndarray) -> np.ndarray:
    """Wrap differences into (-pi, pi]."""
    return d - TAU * np.floor(d / TAU + 0.5)


def reliability_map(wrapped: np.ndarray) -> np.ndarray:
    """Inverse summed squared wrapped second differences; border pixels get 0.

    Higher means unwrap earlier. Border pixels lack the full stencil and are
    deferred to the end of the merge order.
    """
    wrapped = np.asarray(wrapped, dtype=np.float64)
    rows, cols = wrapped.shape
    d2 = np.zeros((rows, cols))
    inner = np.s_[1:-1, 1:-1]

    def second_diff(off):
        dr, dc = off
        before = wrapped[1 - dr : rows - 1 - dr, 1 - dc : cols - 1 - dc]
        after = wrapped[1 + dr : rows - 1 + dr, 1 + dc : cols - 1 + dc]
        center = wrapped[inner]
        return _wrap(before - center) - _wrap(center - after)

    total = np.zeros((rows - 2, cols - 2))
    for off in ((0, 1), (1, 0), (1, 1), (1, -1)):
        total += second_diff(off) ** 2
    d2[inner] = 1.0 / (total + 1e-30)
    return d2


def unwrap_phase_2d(wrapped: np.ndarray) -> np.ndarray:
    """Unwrap values interpretable modulo 2*pi into a continuous surface.

    Output is congruent to the input modulo 2*pi at every pixel; the global
    2*pi multiple is fixed so the highest-reliability pixel keeps its input
    value. Ties in edge reliability break by edge index to keep runs
    deterministic.
    """
    wrapped = np.asarray(wrapped, dtype=np.float64)
    if wrapped.ndim != 2:
        raise ValueError("expected a 2D map")
    rows, cols = wrapped.shape
    n = rows * cols
    rel = reliability_map(wrapped).ravel()
    flat = wrapped.ravel()

    # 4-connectivity edges: (pixel, right neighbor) then (pixel, down neighbor)
    idx = np.arange(n).reshape(rows, cols)
    h_a = idx[:, :-1].ravel()
    h_b = idx[:, 1:].ravel()
    v_a = idx[:-1, :].ravel()
    v_b = idx[1:, :].ravel()
    edge_a = np.concatenate([h_a, v_a])
    edge_b = np.concatenate([h_b, v_b])
    edge_rel = rel[edge_a] + rel[edge_b]
    order = np.argsort(-edge_rel, kind="stable")

    # region merging with per-pixel integer 2*pi counts, small-into-large
    comp = np.arange(n)
    members: list[list[int] | None] = [[i] for i in range(n)]
    k = np.zeros(n)
    for e in order:
        a = int(edge_a[e])
        b = int(edge_b[e])
        ra, rb = comp[a], comp[b]
        if ra == rb:
            continue
        va = flat[a] + TAU * k[a]
        vb = flat[b] + TAU * k[b]
        shift = np.round((va - vb) / TAU)
        if len(members[ra]) < len(members[rb]):
            # moving the a-side instead: subtract the shift
            ra, rb = rb, ra
            shift = -shift
        moved = members[rb]
        if shift != 0.0:
            k[moved] += shift
        comp[moved] = ra
        members[ra].extend(moved)
        members[rb] = None

    out = flat + TAU * k
    anchor = int(np.argmax(rel))
    out -= TAU * k[anchor]
    return out.reshape(rows, cols)


def orientation_to_direction(fo: OrientationMap, min_coverage: float = 0.99):
    """Lift a mod-pi orientation map to a mod-2*pi direction map.

    D = unwrap(2*FO)/2 reduced mod 2*pi. Invalid pixels are inpainted from
    their nearest valid neighbor first; coverage below ``min_coverage``
    fails loudly. Returns (direction, anchor) where ``anchor`` records the
    (row, col, angle) fixing which of the two global pi branches came out.
    """
    coverage = float(fo.valid.mean())
    if coverage < min_coverage:
        raise NumericalError(
            f"orientation coverage {coverage:.4f} below required {min_coverage}"
        )
    angles = fo.angles
    if not fo.valid.all():
        _, (ir, ic) = ndimage.distance_transform_edt(
            ~fo.valid, return_indices=True
        )
        angles = angles[ir, ic]
    unwrapped = unwrap_phase_2d(2.0 * angles)
    direction = np.mod(unwrapped / 2.0, TAU)
    anchor_flat = int(np.argmax(reliability_map(2.0 * angles)))
    anchor = (anchor_flat // fo.shape[1], anchor_flat % fo.shape[1])
    return direction, {
        "row": anchor[0],
        "col": anchor[1],
        "direction": float(direction[anchor]),
    }
