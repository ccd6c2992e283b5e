import numpy as np
import pytest

from fringeproc.image import gradients
from fringeproc.maps import circular_orientation_error
from fringeproc.metrics import orientation_error
from fringeproc.orientation import (
    WindowSpec,
    cpfg_orientation,
    estimate_dominant_period,
    gradient_orientation,
    plane_fit_gradients,
    prefilter,
)
from fringeproc.simulate import (
    CarrierSpec,
    add_gaussian_noise,
    gen_carrier,
    gen_peaks_phase,
    ground_truth_orientation,
    render_fringe,
)


def carrier_fringe(shape, period, theta):
    phase = gen_carrier(shape, CarrierSpec(period, theta))
    return render_fringe(phase), ground_truth_orientation(phase)


class TestWindowSpec:
    def test_rejects_too_small(self):
        with pytest.raises(ValueError):
            WindowSpec(1)

    def test_rejects_window_larger_than_image(self):
        with pytest.raises(ValueError, match="too large"):
            gradient_orientation(np.zeros((16, 16)), WindowSpec(9))


class TestPrefilter:
    def test_clean_fringe_near_zero_mean(self):
        fringe, _ = carrier_fringe((64, 64), 14.0, 0.7)
        assert abs(prefilter(fringe).mean()) < 0.05

    def test_constant_offset_removed(self):
        fringe, _ = carrier_fringe((64, 64), 14.0, 0.7)
        a = prefilter(fringe)
        b = prefilter(fringe + 5.0)
        assert np.sqrt(np.mean((a - b) ** 2)) < 0.05

    def test_constant_image_maps_to_zero(self):
        assert np.abs(prefilter(np.full((32, 32), 2.0))).max() == 0.0

    def test_dominant_period_estimate(self):
        fringe, _ = carrier_fringe((64, 64), 16.0, 0.0)
        assert abs(estimate_dominant_period(fringe) - 16.0) < 2.0

    def test_dominant_period_oblique(self):
        fringe, _ = carrier_fringe((128, 128), 12.0, 1.1)
        assert abs(estimate_dominant_period(fringe) - 12.0) < 1.5

    def test_explicit_background_sigma_uses_blur_recipe(self):
        # a slowly varying background is removed by the literal blur path
        fringe, _ = carrier_fringe((64, 64), 8.0, 0.3)
        y, x = np.mgrid[0:64, 0:64] / 64.0
        background = 2.0 + 1.5 * x + y
        out = prefilter(fringe + background, background_sigma=4.0)
        assert abs(out.mean()) < 0.05
        inner = out[8:-8, 8:-8]
        assert 0.7 < np.percentile(np.abs(inner), 95) < 1.3

    def test_approximately_unit_amplitude(self):
        fringe, _ = carrier_fringe((64, 64), 14.0, 0.3)
        out = prefilter(0.37 * fringe + 1.5)
        interior = out[8:-8, 8:-8]
        assert 0.8 < np.percentile(np.abs(interior), 95) < 1.2


class TestGradientOrientation:
    def test_carrier_theta_zero(self):
        fringe, gt = carrier_fringe((64, 64), 14.0, 0.0)
        fo = gradient_orientation(prefilter(fringe), WindowSpec(2))
        err = circular_orientation_error(fo.angles[8:-8, 8:-8], np.pi / 2)
        assert err.max() < 0.02

    def test_transpose_maps_orientation(self):
        fringe, _ = carrier_fringe((64, 64), 11.0, 0.7)
        fo = gradient_orientation(fringe, WindowSpec(2))
        fo_t = gradient_orientation(np.ascontiguousarray(fringe.T), WindowSpec(2))
        inner = np.s_[8:-8, 8:-8]
        expected = np.mod(np.pi / 2 - fo.angles.T, np.pi)
        err = circular_orientation_error(fo_t.angles[inner], expected[inner])
        assert err.max() < 1e-9

    def test_constant_image_all_invalid(self):
        fo = gradient_orientation(np.full((32, 32), 1.0), WindowSpec(2))
        assert not fo.valid.any()

    def test_angles_in_range(self):
        fringe, _ = carrier_fringe((32, 32), 9.0, 2.2)
        fo = gradient_orientation(fringe, WindowSpec(3))
        assert np.all(fo.angles[fo.valid] >= 0)
        assert np.all(fo.angles[fo.valid] < np.pi)


class TestPlaneFit:
    @pytest.mark.parametrize("w", [3, 4, 5])
    def test_planar_image_exact_everywhere(self, w):
        y, x = np.mgrid[0:24, 0:24].astype(float)
        p1, p2 = plane_fit_gradients(2 * x + 3 * y + 1, WindowSpec(w))
        assert np.abs(p1 - 2).max() < 1e-9
        assert np.abs(p2 - 3).max() < 1e-9

    def test_planar_image_w2_nondegenerate_pixels(self):
        # w=2 windows degenerate on the last row/column (spec: zero gradients)
        y, x = np.mgrid[0:24, 0:24].astype(float)
        p1, p2 = plane_fit_gradients(2 * x + 3 * y + 1, WindowSpec(2))
        assert np.abs(p1[:-1, :-1] - 2).max() < 1e-9
        assert np.abs(p2[:-1, :-1] - 3).max() < 1e-9
        assert np.all(p1[-1, :] == 0) and np.all(p2[:, -1] == 0)

    def test_constant_image_zero_gradients(self):
        p1, p2 = plane_fit_gradients(np.full((16, 16), 5.0), WindowSpec(3))
        assert np.all(p1 == 0) and np.all(p2 == 0)

    def test_carrier_matches_central_differences(self):
        # a 2-point stencil lags central differences by half a pixel, a
        # relative deviation of about omega/2; stay in the low-frequency
        # regime where both estimate the same smooth field within 10%
        fringe, _ = carrier_fringe((64, 64), 48.0, 0.6)
        p1, p2 = plane_fit_gradients(fringe, WindowSpec(2))
        g = gradients(fringe)
        inner = np.s_[4:-4, 4:-4]
        scale = np.sqrt(np.mean(g.gx[inner] ** 2 + g.gy[inner] ** 2))
        rms = np.sqrt(np.mean((p1[inner] - g.gx[inner]) ** 2
                              + (p2[inner] - g.gy[inner]) ** 2))
        assert rms < 0.1 * scale


class TestCPFG:
    def test_pure_carrier_near_zero_error(self):
        # peaks coefficient a = 0 reduces to the T=14 carrier
        phase = gen_peaks_phase(64, 0.0) + gen_carrier((64, 64), CarrierSpec(14.0, 0.0))
        gt = ground_truth_orientation(phase)
        fo = cpfg_orientation(prefilter(render_fringe(phase)), WindowSpec(2))
        assert orientation_error(fo, gt, exclude_border=8) < 1e-3

    def test_bigger_window_helps_under_noise(self):
        oes = {2: [], 4: []}
        for seed in range(3):
            phase = gen_carrier((64, 64), CarrierSpec(14.0, 0.9))
            fringe = add_gaussian_noise(render_fringe(phase), 0.1, seed=seed)
            gt = ground_truth_orientation(phase)
            pre = prefilter(fringe)
            for w in (2, 4):
                oes[w].append(orientation_error(cpfg_orientation(pre, WindowSpec(w)), gt, 8))
        assert np.mean(oes[4]) < np.mean(oes[2])

    def test_constant_image_all_invalid(self):
        fo = cpfg_orientation(np.full((32, 32), 1.0), WindowSpec(2))
        assert not fo.valid.any()

    def test_matches_gradient_method_on_planar_input(self):
        y, x = np.mgrid[0:32, 0:32].astype(float)
        img = 0.02 * x + 0.05 * y
        a = gradient_orientation(img, WindowSpec(2))
        b = cpfg_orientation(img, WindowSpec(2))
        inner = np.s_[2:-2, 2:-2]
        err = circular_orientation_error(a.angles[inner], b.angles[inner])
        assert err.max() < 1e-9


class TestEstimatorInvariants:
    @pytest.mark.parametrize("estimator", [gradient_orientation, cpfg_orientation])
    def test_carrier_sweep_interior_error(self, estimator):
        thetas = np.linspace(0, np.pi, 8, endpoint=False)
        for period in (8.0, 32.0):
            for theta in thetas:
                fringe, gt = carrier_fringe((64, 64), period, theta)
                fo = estimator(prefilter(fringe), WindowSpec(2))
                assert orientation_error(fo, gt, exclude_border=8) < 0.02

    @pytest.mark.parametrize("estimator", [gradient_orientation, cpfg_orientation])
    def test_pi_periodicity_under_image_negation(self, estimator):
        # negating the image shifts fringe phase by pi; FO must not move
        phase = gen_peaks_phase(48, 2.0) + gen_carrier((48, 48), CarrierSpec(12.0, 1.1))
        fringe = render_fringe(phase)
        fo = estimator(fringe, WindowSpec(2))
        fo_neg = estimator(-fringe, WindowSpec(2))
        inner = np.s_[4:-4, 4:-4]
        err = circular_orientation_error(fo.angles[inner], fo_neg.angles[inner])
        assert err.max() < 1e-6
