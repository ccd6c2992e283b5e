"""Train a small orientation network and compare it with the classical estimator.

Generates a miniature corpus (60 train / 15 validation images at 48x48), trains
a two-path residual network for a few epochs, and pits it against CPFG on a
noisy fringe the network never saw. Runs in about a minute on a laptop CPU; for
the full desk-scale protocol (200/50 at 64x64, 16 filters, 10 epochs), see
tests/test_acceptance.py or the `fringeproc train` command.
"""

import tempfile
from pathlib import Path

from fringeproc import (
    CarrierSpec,
    DatasetManifest,
    NetworkConfig,
    TrainConfig,
    WindowSpec,
    add_gaussian_noise,
    cpfg_orientation,
    gen_carrier,
    gen_peaks_phase,
    ground_truth_orientation,
    infer_orientation,
    make_dataset,
    orientation_error,
    prefilter,
    render_fringe,
    train,
)
from fringeproc.training import load_samples

root = Path(tempfile.mkdtemp(prefix="fringeproc_demo_"))
print(f"Working under {root}")

print("Generating 60 + 15 seeded training images (48x48)...")
make_dataset(DatasetManifest(base_seed=11, count=60, rows=48, cols=48), root / "train")
make_dataset(DatasetManifest(base_seed=13, count=15, rows=48, cols=48), root / "val")
train_set = load_samples(root / "train")
val_set = load_samples(root / "val")

net_cfg = NetworkConfig(paths=2, filters=8, blocks_per_path=2)
# the reference protocol trains at 1e-4 for 10+ epochs; this miniature demo
# trades fidelity for wall-clock with a hotter rate
train_cfg = TrainConfig(initial_lr=1e-3, epochs=8, batch_size=1, shuffle_seed=3)
print(f"Training {net_cfg.paths} paths x {net_cfg.filters} filters, "
      f"{train_cfg.epochs} epochs (batch 1, Adam)...")
result = train(train_set, val_set, net_cfg, train_cfg)
for h in result.history:
    print(f"  epoch {h['epoch']}: lr {h['lr']:.1e}  train {h['train_loss']:.4f}  "
          f"val {h['val_loss']:.4f}  val OE {h['val_oe']:.4f}")

print("\nHeld-out comparison: noisy peaks fringe (a=2, std 0.1) at 96x96")
phase = gen_peaks_phase(96, 2.0) + gen_carrier((96, 96), CarrierSpec(14.0, 0.4))
fringe = add_gaussian_noise(render_fringe(phase), 0.1, seed=5)
truth = ground_truth_orientation(phase)
filtered = prefilter(fringe)
oe_net = orientation_error(infer_orientation(result.weights, filtered), truth, 8)
oe_cpfg = orientation_error(cpfg_orientation(filtered, WindowSpec(2)), truth, 8)
print(f"  network OE {oe_net:.4f}   cpfg OE {oe_cpfg:.4f}")
print("Even this miniature network resists noise that the w=2 classical"
      " estimator amplifies.")
