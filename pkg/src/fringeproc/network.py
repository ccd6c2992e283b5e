"""Multi-path residual CNN for orientation-encoding regression, from scratch.

Architecture: each path p applies an input conv (1 -> filters, ReLU), p-1
maxpoolings (2x2, stride 2, all before the residual stack), a fixed number of
residual blocks (x + conv(relu(conv(x))), ReLU after the sum), and a nearest
upsample back to the input size; path outputs are concatenated and a final
linear 3x3 conv produces the (sin 2FO, cos 2FO) channels. Same-padding
everywhere so output height/width always equal the input's.

Forward/backward are exact (no autograd): convolutions run as im2col matmuls,
maxpool routes gradients through its argmax, nearest upsample block-sums them.
Weights live as float64 in memory and as float32 in the FPAW file.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    BadMagicError,
    NonFiniteSampleError,
    ShapeAuditError,
    TruncatedPayloadError,
    VersionMismatchError,
)
from .maps import OrientationEncoding, OrientationMap, decode_orientation

WEIGHTS_MAGIC = b"FPAW"
WEIGHTS_VERSION = 1
_WHEADER = struct.Struct("<4sII")


@dataclass(frozen=True)
class NetworkConfig:
    """Shape of the multi-path network: paths in [2, 5], filters per path."""

    paths: int = 2
    filters: int = 16
    blocks_per_path: int = 2
    kernel_size: int = 3

    def __post_init__(self):
        if not 2 <= self.paths <= 5:
            raise ValueError("paths must lie in [2, 5]")
        if self.filters < 1:
            raise ValueError("filters must be positive")
        if self.blocks_per_path < 1:
            raise ValueError("blocks_per_path must be positive")
        if self.kernel_size % 2 != 1:
            raise ValueError("kernel_size must be odd")

    @property
    def size_divisor(self) -> int:
        return 2 ** (self.paths - 1)

    def check_input_shape(self, shape) -> None:
        rows, cols = shape
        if min(rows, cols) < 8:
            raise ValueError(f"input {rows}x{cols} below the 8x8 estimator floor")
        d = self.size_divisor
        if rows % d or cols % d:
            raise ValueError(
                f"input {rows}x{cols} not divisible by 2^(paths-1) = {d}"
            )

    def to_json(self) -> dict:
        return {
            "paths": self.paths,
            "filters": self.filters,
            "blocks_per_path": self.blocks_per_path,
            "kernel_size": self.kernel_size,
        }

    @classmethod
    def from_json(cls, data: dict) -> "NetworkConfig":
        return cls(
            paths=data["paths"],
            filters=data["filters"],
            blocks_per_path=data["blocks_per_path"],
            kernel_size=data["kernel_size"],
        )


def tensor_specs(cfg: NetworkConfig) -> list[tuple[str, tuple]]:
    """Named tensors in their canonical (file) order."""
    k = cfg.kernel_size
    f = cfg.filters
    specs: list[tuple[str, tuple]] = []
    for p in range(1, cfg.paths + 1):
        specs.append((f"path{p}.in.w", (f, 1, k, k)))
        specs.append((f"path{p}.in.b", (f,)))
        for b in range(1, cfg.blocks_per_path + 1):
            specs.append((f"path{p}.block{b}.conv1.w", (f, f, k, k)))
            specs.append((f"path{p}.block{b}.conv1.b", (f,)))
            specs.append((f"path{p}.block{b}.conv2.w", (f, f, k, k)))
            specs.append((f"path{p}.block{b}.conv2.b", (f,)))
    specs.append(("final.w", (2, cfg.paths * f, k, k)))
    specs.append(("final.b", (2,)))
    return specs


@dataclass
class ModelWeights:
    """Ordered named tensors plus the configuration that shaped them."""

    config: NetworkConfig
    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    def audit(self) -> None:
        expected = tensor_specs(self.config)
        names = list(self.tensors)
        if names != [n for n, _ in expected]:
            raise ShapeAuditError("tensor names disagree with the configuration")
        for name, shape in expected:
            t = self.tensors[name]
            if t.shape != shape:
                raise ShapeAuditError(
                    f"{name}: stored shape {t.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(t)):
                raise NonFiniteSampleError(f"{name}: non-finite weights")

    def copy(self) -> "ModelWeights":
        return ModelWeights(
            config=self.config,
            tensors={k: v.copy() for k, v in self.tensors.items()},
        )


def build_network(cfg: NetworkConfig, init_seed: int) -> ModelWeights:
    """Seeded Glorot-uniform kernels (+/- sqrt(6/(fan_in+fan_out))), zero biases."""
    rng = np.random.Generator(np.random.PCG64(init_seed))
    k2 = cfg.kernel_size**2
    tensors: dict[str, np.ndarray] = {}
    for name, shape in tensor_specs(cfg):
        if name.endswith(".b"):
            tensors[name] = np.zeros(shape)
        else:
            out_ch, in_ch = shape[0], shape[1]
            limit = np.sqrt(6.0 / (in_ch * k2 + out_ch * k2))
            tensors[name] = rng.uniform(-limit, limit, size=shape)
    return ModelWeights(config=cfg, tensors=tensors)


# --------------------------------------------------------------------------
# Layer primitives (forward + exact backward)


def _im2col(x: np.ndarray, k: int) -> np.ndarray:
    """(C, H, W) -> (H*W, C*k*k) patch matrix with same-padding."""
    pad = k // 2
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    win = sliding_window_view(xp, (k, k), axis=(1, 2))  # (C, H, W, k, k)
    h, w = x.shape[1], x.shape[2]
    return win.transpose(1, 2, 0, 3, 4).reshape(h * w, -1)


def conv2d_same(x: np.ndarray, w: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Cross-correlation with same-padding: (Cin,H,W) -> (Cout,H,W)."""
    cout = w.shape[0]
    k = w.shape[2]
    h, ww = x.shape[1], x.shape[2]
    out = _im2col(x, k) @ w.reshape(cout, -1).T
    if b is not None:
        out += b
    return out.T.reshape(cout, h, ww)


def conv2d_backward(d_out: np.ndarray, x: np.ndarray, w: np.ndarray):
    """Gradients of conv2d_same w.r.t. input, kernel and bias."""
    cout = w.shape[0]
    k = w.shape[2]
    d_mat = d_out.reshape(cout, -1).T  # (H*W, Cout)
    dw = (d_mat.T @ _im2col(x, k)).reshape(w.shape)
    db = d_out.sum(axis=(1, 2))
    w_flip = w.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1]
    dx = conv2d_same(d_out, w_flip)
    return dx, dw, db


def maxpool2(x: np.ndarray):
    """2x2 stride-2 max; returns (pooled, argmax routing for backward)."""
    c, h, w = x.shape
    tiles = (
        x.reshape(c, h // 2, 2, w // 2, 2)
        .transpose(0, 1, 3, 2, 4)
        .reshape(c, h // 2, w // 2, 4)
    )
    idx = tiles.argmax(axis=3)
    out = np.take_along_axis(tiles, idx[..., None], axis=3)[..., 0]
    return out, idx


def maxpool2_backward(d_out: np.ndarray, idx: np.ndarray, in_shape) -> np.ndarray:
    c, h, w = in_shape
    tiles = np.zeros((c, h // 2, w // 2, 4))
    np.put_along_axis(tiles, idx[..., None], d_out[..., None], axis=3)
    return (
        tiles.reshape(c, h // 2, w // 2, 2, 2)
        .transpose(0, 1, 3, 2, 4)
        .reshape(c, h, w)
    )


def upsample_nearest(x: np.ndarray, factor: int) -> np.ndarray:
    return np.repeat(np.repeat(x, factor, axis=1), factor, axis=2)


def upsample_nearest_backward(d_out: np.ndarray, factor: int) -> np.ndarray:
    c, h, w = d_out.shape
    return d_out.reshape(c, h // factor, factor, w // factor, factor).sum(axis=(2, 4))


# --------------------------------------------------------------------------
# Full network


def _forward_with_caches(weights: ModelWeights, img: np.ndarray):
    cfg = weights.config
    cfg.check_input_shape(img.shape)
    t = weights.tensors
    x0 = np.asarray(img, dtype=np.float64)[np.newaxis]  # (1, H, W)

    path_outputs = []
    path_caches = []
    for p in range(1, cfg.paths + 1):
        cache: dict = {}
        pre = conv2d_same(x0, t[f"path{p}.in.w"], t[f"path{p}.in.b"])
        cache["in_pre"] = pre
        h = np.maximum(pre, 0.0)

        pools = []
        for _ in range(p - 1):
            shape = h.shape
            h, idx = maxpool2(h)
            pools.append((idx, shape))
        cache["pools"] = pools

        blocks = []
        for b in range(1, cfg.blocks_per_path + 1):
            x_in = h
            h1 = conv2d_same(x_in, t[f"path{p}.block{b}.conv1.w"],
                             t[f"path{p}.block{b}.conv1.b"])
            r1 = np.maximum(h1, 0.0)
            h2 = conv2d_same(r1, t[f"path{p}.block{b}.conv2.w"],
                             t[f"path{p}.block{b}.conv2.b"])
            s = x_in + h2
            h = np.maximum(s, 0.0)
            blocks.append({"x_in": x_in, "h1": h1, "r1": r1, "s": s})
        cache["blocks"] = blocks

        factor = 2 ** (p - 1)
        if factor > 1:
            h = upsample_nearest(h, factor)
        path_outputs.append(h)
        path_caches.append(cache)

    concat = np.concatenate(path_outputs, axis=0)
    out = conv2d_same(concat, t["final.w"], t["final.b"])
    return out, {"x0": x0, "paths": path_caches, "concat": concat}


def forward(weights: ModelWeights, img: np.ndarray) -> OrientationEncoding:
    """Deterministic forward pass; output channels match the input size."""
    out, _ = _forward_with_caches(weights, img)
    return OrientationEncoding(sin2=out[0], cos2=out[1])


def backward(weights: ModelWeights, img: np.ndarray,
             target: OrientationEncoding):
    """Exact gradients of the MSE loss w.r.t. every tensor.

    Returns (grads, loss, prediction); grads share the tensor names/order of
    the weights.
    """
    cfg = weights.config
    t = weights.tensors
    out, caches = _forward_with_caches(weights, img)
    target_arr = target.to_array()
    if target_arr.shape != out.shape:
        raise ValueError(f"target shape {target_arr.shape} != output {out.shape}")

    diff = out - target_arr
    n = diff.size
    loss = float(np.mean(diff**2))
    d_out = 2.0 * diff / n

    grads = {name: np.zeros_like(arr) for name, arr in t.items()}

    d_concat, grads["final.w"], grads["final.b"] = conv2d_backward(
        d_out, caches["concat"], t["final.w"]
    )

    f = cfg.filters
    for p in range(1, cfg.paths + 1):
        cache = caches["paths"][p - 1]
        d_path = d_concat[(p - 1) * f : p * f]

        factor = 2 ** (p - 1)
        if factor > 1:
            d_path = upsample_nearest_backward(d_path, factor)

        for b in range(cfg.blocks_per_path, 0, -1):
            blk = cache["blocks"][b - 1]
            ds = d_path * (blk["s"] > 0.0)
            dr1, dw2, db2 = conv2d_backward(
                ds, blk["r1"], t[f"path{p}.block{b}.conv2.w"]
            )
            grads[f"path{p}.block{b}.conv2.w"] = dw2
            grads[f"path{p}.block{b}.conv2.b"] = db2
            dh1 = dr1 * (blk["h1"] > 0.0)
            dx_in, dw1, db1 = conv2d_backward(
                dh1, blk["x_in"], t[f"path{p}.block{b}.conv1.w"]
            )
            grads[f"path{p}.block{b}.conv1.w"] = dw1
            grads[f"path{p}.block{b}.conv1.b"] = db1
            d_path = ds + dx_in

        for idx, shape in reversed(cache["pools"]):
            d_path = maxpool2_backward(d_path, idx, shape)

        d_pre = d_path * (cache["in_pre"] > 0.0)
        _, dwi, dbi = conv2d_backward(d_pre, caches["x0"], t[f"path{p}.in.w"])
        grads[f"path{p}.in.w"] = dwi
        grads[f"path{p}.in.b"] = dbi

    return grads, loss, OrientationEncoding(sin2=out[0], cos2=out[1])


def infer_orientation(weights: ModelWeights, img: np.ndarray) -> OrientationMap:
    """Forward, renormalize (sin, cos) to unit length, decode to [0, pi)."""
    enc = forward(weights, img)
    mag = np.hypot(enc.sin2, enc.cos2)
    ok = mag**2 >= 1e-6
    safe = np.where(ok, mag, 1.0)
    return decode_orientation(
        OrientationEncoding(
            sin2=np.where(ok, enc.sin2 / safe, enc.sin2),
            cos2=np.where(ok, enc.cos2 / safe, enc.cos2),
        )
    )


# --------------------------------------------------------------------------
# FPAW weights file


def save_weights(weights: ModelWeights, path) -> None:
    """FPAW: magic, version, JSON config + tensor table, float32 LE tensors."""
    weights.audit()
    table = [
        {"name": name, "shape": list(shape)}
        for name, shape in tensor_specs(weights.config)
    ]
    header_json = json.dumps(
        {"config": weights.config.to_json(), "tensors": table},
        sort_keys=True,
    ).encode("utf-8")
    path = str(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(_WHEADER.pack(WEIGHTS_MAGIC, WEIGHTS_VERSION, len(header_json)))
        fh.write(header_json)
        for name, _ in tensor_specs(weights.config):
            fh.write(weights.tensors[name].astype("<f4").tobytes())
    os.replace(tmp, path)


def load_weights(path) -> ModelWeights:
    """Read FPAW and re-audit tensor shapes against the embedded config."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _WHEADER.size:
        raise TruncatedPayloadError(f"{path}: file shorter than the FPAW header")
    magic, version, json_len = _WHEADER.unpack_from(raw)
    if magic != WEIGHTS_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}, expected {WEIGHTS_MAGIC!r}")
    if version != WEIGHTS_VERSION:
        raise VersionMismatchError(f"{path}: version {version}, expected {WEIGHTS_VERSION}")
    if len(raw) < _WHEADER.size + json_len:
        raise TruncatedPayloadError(f"{path}: truncated JSON header")
    meta = json.loads(raw[_WHEADER.size : _WHEADER.size + json_len])
    cfg = NetworkConfig.from_json(meta["config"])

    expected = tensor_specs(cfg)
    stored = [(entry["name"], tuple(entry["shape"])) for entry in meta["tensors"]]
    if stored != expected:
        raise ShapeAuditError(f"{path}: tensor table disagrees with the config")

    offset = _WHEADER.size + json_len
    tensors: dict[str, np.ndarray] = {}
    for name, shape in expected:
        count = int(np.prod(shape))
        end = offset + 4 * count
        if end > len(raw):
            raise TruncatedPayloadError(f"{path}: tensor {name} truncated")
        arr = np.frombuffer(raw, dtype="<f4", count=count, offset=offset)
        tensors[name] = arr.reshape(shape).astype(np.float64)
        offset = end
    if offset != len(raw):
        raise TruncatedPayloadError(f"{path}: {len(raw) - offset} trailing bytes")
    model = ModelWeights(config=cfg, tensors=tensors)
    model.audit()
    return model
