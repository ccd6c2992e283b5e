import numpy as np
import pytest

from fringeproc.errors import (
    BadMagicError,
    ShapeAuditError,
    TruncatedPayloadError,
    VersionMismatchError,
)
from fringeproc.maps import OrientationEncoding
from fringeproc.network import (
    NetworkConfig,
    _forward_with_caches,
    backward,
    build_network,
    forward,
    infer_orientation,
    load_weights,
    maxpool2,
    maxpool2_backward,
    save_weights,
    tensor_specs,
)
from fringeproc.training import loss_mse

TINY = NetworkConfig(paths=2, filters=2, blocks_per_path=1)


def random_input(shape, seed=0):
    return np.random.default_rng(seed).standard_normal(shape)


def random_target(shape, seed=1):
    rng = np.random.default_rng(seed)
    return OrientationEncoding(sin2=rng.standard_normal(shape),
                               cos2=rng.standard_normal(shape))


def activation_signature(weights, img):
    """ReLU gates and pooling routes; FD checks are valid only where these
    stay fixed across the +/-h probes."""
    _, caches = _forward_with_caches(weights, img)
    parts = []
    for cache in caches["paths"]:
        parts.append((cache["in_pre"] > 0).tobytes())
        for idx, _ in cache["pools"]:
            parts.append(idx.tobytes())
        for blk in cache["blocks"]:
            parts.append((blk["h1"] > 0).tobytes())
            parts.append((blk["s"] > 0).tobytes())
    return b"".join(parts)


class TestConfig:
    def test_paths_bounds(self):
        with pytest.raises(ValueError):
            NetworkConfig(paths=1)
        with pytest.raises(ValueError):
            NetworkConfig(paths=6)

    def test_kernel_must_be_odd(self):
        with pytest.raises(ValueError):
            NetworkConfig(kernel_size=4)

    def test_input_divisibility(self):
        cfg = NetworkConfig(paths=3, filters=4)
        with pytest.raises(ValueError, match="divisible"):
            cfg.check_input_shape((66, 64))


class TestBuild:
    def test_reference_architecture_shape(self):
        # the published selection: two paths, 110 filters
        cfg = NetworkConfig(paths=2, filters=110, blocks_per_path=2)
        w = build_network(cfg, init_seed=0)
        w.audit()
        assert w.tensors["final.w"].shape == (2, 220, 3, 3)
        assert w.tensors["path1.in.w"].shape == (110, 1, 3, 3)

    def test_seeded_init_reproducible(self):
        a = build_network(TINY, init_seed=5)
        b = build_network(TINY, init_seed=5)
        c = build_network(TINY, init_seed=6)
        for name in a.tensors:
            assert np.array_equal(a.tensors[name], b.tensors[name])
        assert any(not np.array_equal(a.tensors[n], c.tensors[n]) for n in a.tensors)

    def test_glorot_bounds(self):
        cfg = NetworkConfig(paths=2, filters=8, blocks_per_path=1)
        w = build_network(cfg, init_seed=1)
        k = w.tensors["path1.block1.conv1.w"]
        limit = np.sqrt(6.0 / (8 * 9 + 8 * 9))
        assert np.abs(k).max() <= limit
        assert np.all(w.tensors["path1.in.b"] == 0)


class TestForward:
    @pytest.mark.parametrize("n", [64, 96])
    def test_output_matches_input_size(self, n):
        cfg = NetworkConfig(paths=2, filters=4, blocks_per_path=1)
        out = forward(build_network(cfg, 0), random_input((n, n)))
        assert out.sin2.shape == (n, n) and out.cos2.shape == (n, n)

    def test_rectangular_input(self):
        out = forward(build_network(TINY, 0), random_input((16, 24)))
        assert out.shape == (16, 24)

    def test_zero_weights_output_final_bias(self):
        w = build_network(TINY, 0)
        for name in w.tensors:
            w.tensors[name][:] = 0.0
        w.tensors["final.b"][:] = (0.25, -0.5)
        out = forward(w, random_input((8, 8)))
        assert np.all(out.sin2 == 0.25) and np.all(out.cos2 == -0.5)

    def test_forward_bit_reproducible(self):
        w = build_network(TINY, 3)
        img = random_input((16, 16))
        a = forward(w, img)
        b = forward(w, img)
        assert np.array_equal(a.sin2, b.sin2) and np.array_equal(a.cos2, b.cos2)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="divisible"):
            forward(build_network(TINY, 0), random_input((9, 9)))


class TestMaxpool:
    def test_tie_routes_to_first_argmax(self):
        x = np.full((1, 2, 2), 3.0)  # a fully tied tile
        out, idx = maxpool2(x)
        assert out[0, 0, 0] == 3.0 and idx[0, 0, 0] == 0
        back = maxpool2_backward(np.ones((1, 1, 1)), idx, (1, 2, 2))
        assert back[0, 0, 0] == 1.0 and back.sum() == 1.0

    def test_pool_and_routing_values(self):
        x = np.arange(16, dtype=float).reshape(1, 4, 4)
        out, idx = maxpool2(x)
        assert np.array_equal(out[0], [[5, 7], [13, 15]])
        back = maxpool2_backward(np.array([[[1.0, 2.0], [3.0, 4.0]]]), idx, (1, 4, 4))
        assert back[0, 1, 1] == 1.0 and back[0, 3, 3] == 4.0
        assert back.sum() == 10.0


class TestUpsample:
    def test_round_trip_block_sum(self):
        from fringeproc.network import upsample_nearest, upsample_nearest_backward
        x = np.arange(8, dtype=float).reshape(2, 2, 2)
        up = upsample_nearest(x, 2)
        assert up.shape == (2, 4, 4)
        assert np.all(up[:, :2, :2] == x[:, :1, :1] * 0 + x[:, 0:1, 0:1])
        # backward sums each 2x2 block: ones gradient -> 4 per source pixel
        back = upsample_nearest_backward(np.ones((2, 4, 4)), 2)
        assert np.all(back == 4.0)


class TestBackward:
    @pytest.mark.parametrize("cfg,seed", [
        (TINY, 7),
        # three paths exercise the stacked-pooling route (downsample by 4)
        (NetworkConfig(paths=3, filters=2, blocks_per_path=1), 13),
    ])
    def test_gradients_match_finite_differences(self, cfg, seed):
        w = build_network(cfg, seed)
        img = random_input((8, 8), seed=1)
        target = random_target((8, 8), seed=2)
        grads, _, _ = backward(w, img, target)
        rng = np.random.default_rng(77)
        names = list(w.tensors)
        h = 1e-3
        checked = 0
        while checked < 25:
            name = names[rng.integers(len(names))]
            flat = w.tensors[name].ravel()
            i = int(rng.integers(flat.size))
            orig = flat[i]
            flat[i] = orig + h
            sig_p = activation_signature(w, img)
            lp = loss_mse(forward(w, img), target)
            flat[i] = orig - h
            sig_m = activation_signature(w, img)
            lm = loss_mse(forward(w, img), target)
            flat[i] = orig
            if sig_p != sig_m:
                continue  # FD straddles a ReLU/pool kink; not a valid probe
            g_fd = (lp - lm) / (2 * h)
            g_an = grads[name].ravel()[i]
            assert abs(g_an - g_fd) / max(abs(g_fd), 1e-8) < 1e-3
            checked += 1

    def test_zero_input_zero_bias_first_layer_grads_vanish(self):
        w = build_network(TINY, 0)
        target = random_target((8, 8))
        grads, _, _ = backward(w, np.zeros((8, 8)), target)
        assert np.all(grads["path1.in.w"] == 0)
        assert np.all(grads["path2.in.w"] == 0)

    def test_loss_gradient_definition_via_final_bias(self):
        # d out / d final.b = 1 everywhere, so its gradient must equal the
        # channel sums of dL/dpred = 2 (pred - target) / N
        w = build_network(TINY, 9)
        img = random_input((8, 8), seed=3)
        target = random_target((8, 8), seed=4)
        grads, _, pred = backward(w, img, target)
        n = 2 * 8 * 8
        expected = [
            np.sum(2.0 * (pred.sin2 - target.sin2) / n),
            np.sum(2.0 * (pred.cos2 - target.cos2) / n),
        ]
        assert np.allclose(grads["final.b"], expected, atol=1e-12)

    def test_target_shape_mismatch(self):
        w = build_network(TINY, 0)
        with pytest.raises(ValueError, match="target"):
            backward(w, random_input((8, 8)), random_target((16, 16)))


class TestInference:
    def test_output_range_and_mask(self):
        w = build_network(TINY, 11)
        fo = infer_orientation(w, random_input((16, 16)))
        assert np.all(fo.angles[fo.valid] >= 0)
        assert np.all(fo.angles[fo.valid] < np.pi)

    def test_zero_weights_give_valid_constant(self):
        w = build_network(TINY, 0)
        for name in w.tensors:
            w.tensors[name][:] = 0.0
        w.tensors["final.b"][:] = (0.0, 1.0)  # encodes FO = 0
        fo = infer_orientation(w, random_input((8, 8)))
        assert fo.valid.all() and np.all(fo.angles == 0.0)


class TestWeightsFile:
    def _float32_weights(self):
        w = build_network(TINY, 21)
        for name in w.tensors:
            w.tensors[name] = w.tensors[name].astype(np.float32).astype(np.float64)
        return w

    def test_round_trip_identity(self, tmp_path):
        w = self._float32_weights()
        path = tmp_path / "m.fpaw"
        save_weights(w, path)
        back = load_weights(path)
        assert back.config == w.config
        for name in w.tensors:
            assert np.array_equal(back.tensors[name], w.tensors[name])

    def test_save_load_save_byte_identical(self, tmp_path):
        w = self._float32_weights()
        p1, p2 = tmp_path / "a.fpaw", tmp_path / "b.fpaw"
        save_weights(w, p1)
        save_weights(load_weights(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_tensor_rejected(self, tmp_path):
        path = tmp_path / "m.fpaw"
        save_weights(self._float32_weights(), path)
        raw = path.read_bytes()
        path.write_bytes(raw[:-8])
        with pytest.raises(TruncatedPayloadError):
            load_weights(path)

    def test_bad_magic_and_version(self, tmp_path):
        path = tmp_path / "m.fpaw"
        save_weights(self._float32_weights(), path)
        raw = bytearray(path.read_bytes())
        good = bytes(raw)
        raw[:4] = b"XXXX"
        path.write_bytes(bytes(raw))
        with pytest.raises(BadMagicError):
            load_weights(path)
        raw = bytearray(good)
        raw[4:8] = (7).to_bytes(4, "little")
        path.write_bytes(bytes(raw))
        with pytest.raises(VersionMismatchError):
            load_weights(path)

    def test_config_tensor_disagreement_rejected(self, tmp_path):
        # tensors shaped for filters=2 but header claims filters=4
        w = self._float32_weights()
        path = tmp_path / "m.fpaw"
        save_weights(w, path)
        raw = path.read_bytes()
        swapped = raw.replace(b'"filters": 2', b'"filters": 4', 1)
        assert swapped != raw
        path.write_bytes(swapped)
        with pytest.raises(ShapeAuditError):
            load_weights(path)

    def test_audit_catches_wrong_shape(self):
        w = build_network(TINY, 0)
        w.tensors["final.b"] = np.zeros(3)
        with pytest.raises(ShapeAuditError):
            w.audit()

    def test_tensor_spec_order_is_stable(self):
        names = [n for n, _ in tensor_specs(TINY)]
        assert names[0] == "path1.in.w"
        assert names[-2:] == ["final.w", "final.b"]
