import sys
from dataclasses import dataclass

import pytest

from fringeproc.network import ModelWeights, NetworkConfig, build_network
from fringeproc.simulate import DatasetManifest, make_dataset, splitmix64
from fringeproc.training import Sample, TrainConfig, TrainResult, evaluate_model, load_samples, train

DESK_NET = NetworkConfig(paths=2, filters=16, blocks_per_path=2)
DESK_TRAIN = TrainConfig(initial_lr=1e-4, lr_drop_factor=5.0,
                         lr_drop_period_epochs=5, epochs=10, batch_size=1,
                         shuffle_seed=7)


@dataclass
class DeskRun:
    """The shared desk-scale training run used by acceptance criteria 6, 7, 10."""

    train_samples: list[Sample]
    val_samples: list[Sample]
    result: TrainResult
    untrained: ModelWeights
    untrained_val_oe: float

    @property
    def weights(self) -> ModelWeights:
        return self.result.weights

    def escalate(self, filters: int) -> TrainResult:
        """One-shot retrain at a wider configuration (criterion 7 fallback)."""
        cfg = NetworkConfig(paths=DESK_NET.paths, filters=filters,
                            blocks_per_path=DESK_NET.blocks_per_path)
        return train(self.train_samples, self.val_samples, cfg, DESK_TRAIN)


@pytest.fixture(scope="session")
def desk_run(tmp_path_factory) -> DeskRun:
    root = tmp_path_factory.mktemp("desk")
    print("\n[desk-scale fixture] generating 200 train + 50 val images at 64x64...",
          file=sys.stderr, flush=True)
    make_dataset(DatasetManifest(base_seed=2024, count=200, rows=64, cols=64),
                 root / "train")
    make_dataset(DatasetManifest(base_seed=9090, count=50, rows=64, cols=64),
                 root / "val")
    trn = load_samples(root / "train")
    val = load_samples(root / "val")

    untrained = build_network(DESK_NET, init_seed=splitmix64(DESK_TRAIN.shuffle_seed))
    _, untrained_oe = evaluate_model(untrained, val)
    print(f"[desk-scale fixture] untrained validation OE {untrained_oe:.4f}; "
          "training 10 epochs (a few minutes)...", file=sys.stderr, flush=True)
    result = train(trn, val, DESK_NET, DESK_TRAIN)
    print(f"[desk-scale fixture] best epoch {result.best_epoch}, "
          f"val OE {result.history[result.best_epoch - 1]['val_oe']:.4f}",
          file=sys.stderr, flush=True)
    return DeskRun(train_samples=trn, val_samples=val, result=result,
                   untrained=untrained, untrained_val_oe=untrained_oe)
