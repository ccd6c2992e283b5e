"""Simulate a fringe pattern and estimate its local orientation map.

Builds a peaks-modulated carrier fringe with known phase, runs both classical
estimators on the prefiltered intensity, and scores them against the analytic
ground truth. Takes a couple of seconds.
"""

from fringeproc import (
    CarrierSpec,
    WindowSpec,
    add_gaussian_noise,
    cpfg_orientation,
    gen_carrier,
    gen_peaks_phase,
    gradient_orientation,
    ground_truth_orientation,
    orientation_error,
    prefilter,
    render_fringe,
)

SIZE = 256
CARRIER = CarrierSpec(period_T=14.0, theta=0.0)

print(f"Simulating a {SIZE}x{SIZE} fringe: peaks object (a=3) on a T=14 carrier")
phase = gen_peaks_phase(SIZE, 3.0) + gen_carrier((SIZE, SIZE), CARRIER)
truth = ground_truth_orientation(phase)

for noise_std in (0.0, 0.1):
    fringe = render_fringe(phase)
    if noise_std > 0:
        fringe = add_gaussian_noise(fringe, noise_std, seed=42)
    filtered = prefilter(fringe)
    print(f"\nnoise std = {noise_std}")
    for name, estimator in (("gradient", gradient_orientation),
                            ("cpfg    ", cpfg_orientation)):
        fo = estimator(filtered, WindowSpec(2))
        oe = orientation_error(fo, truth, exclude_border=8)
        coverage = fo.valid.mean()
        print(f"  {name}  orientation error {oe:.4f}   valid pixels {coverage:.1%}")

print("\nThe plane-fit/gradient combination is near error-free on clean fringes;")
print("its small-window variant pays for that locality once noise appears.")
