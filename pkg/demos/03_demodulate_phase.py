"""Recover the phase of a single fringe pattern with spiral-transform demodulation.

A closed-form object phase produces the fringe; its orientation map is lifted
to a direction map by the x2 / unwrap / /2 procedure and guides the quadrature.
The recovered continuous phase is compared against the known truth.
"""

import numpy as np

from fringeproc import (
    CarrierSpec,
    demodulate,
    gen_carrier,
    gen_peaks_phase,
    ground_truth_orientation,
    orientation_to_direction,
    render_fringe,
    rmse_phase,
)

SIZE = 256
phase = gen_peaks_phase(SIZE, 5.0) + gen_carrier((SIZE, SIZE), CarrierSpec(14.0, 0.0))
fringe = render_fringe(phase)
print(f"Fringe: {SIZE}x{SIZE}, peaks a=5 over a T=14 carrier")

# the simulated cosine is already zero-mean with unit amplitude, so it can go
# straight to the transform; measured data would pass through prefilter() first
fo = ground_truth_orientation(phase)
direction, anchor = orientation_to_direction(fo)
print(f"Direction map unwrapped; branch anchored at "
      f"({anchor['row']}, {anchor['col']}) = {anchor['direction']:.3f} rad")

wrapped, unwrapped, info = demodulate(fringe, direction)
print(f"Demodulated: wrapped phase in [{wrapped.min():.3f}, {wrapped.max():.3f}), "
      f"{info['defined_fraction']:.1%} pixels defined")

# a flipped branch would negate the phase; score the better global sign
rmse = min(rmse_phase(unwrapped, phase, exclude_border=16),
           rmse_phase(-unwrapped, phase, exclude_border=16))
print(f"Piston-removed phase RMSE vs truth (16 px border excluded): {rmse:.4f} rad")
print(f"Phase span recovered: {np.ptp(unwrapped):.1f} rad "
      f"(truth {np.ptp(phase):.1f} rad)")
