"""Train the digit model and export activation tables, usable as
``bitp-model-adapter train-and-export``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, export
from .data import load_splits, shifted_variants
from .model import evaluate_accuracy, pool_activations_and_predictions, train_model

ACCURACY_FLOOR = 0.97


def train_and_export(
    out_dir,
    seed: int,
    epochs: int = 12,
    batch_size: int = 64,
    limit: int | None = None,
    archive_path=None,
    augment: bool = True,
    augment_mining_table: bool = True,
) -> dict:
    """Returns the bundle manifest; writes train/, heldout/, test/, depmap.json.

    The mining table ('train') holds its original images first, then their
    four one-pixel shifts (the same variants the model trained on), lifting
    4,000 mining rows to 20,000.  Premise rows are therefore the leading
    originals; held-out and test tables stay unshifted.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    splits = load_splits(archive_path)

    t0 = time.monotonic()
    model = train_model(
        splits.train_images, splits.train_labels, seed=seed,
        epochs=epochs, batch_size=batch_size, augment=augment,
    )
    train_seconds = time.monotonic() - t0
    accuracy = evaluate_accuracy(model, splits.test_images, splits.test_labels)

    mine_images = splits.train_images[splits.mine_slice]
    if limit is not None:
        mine_images = mine_images[:limit]
    if augment_mining_table:
        mine_images = np.concatenate(shifted_variants(mine_images))

    tables = {}
    table_slices = {
        "train": mine_images,
        "heldout": splits.train_images[splits.heldout_slice],
        "test": splits.test_images,
    }
    for name, images in table_slices.items():
        if limit is not None and name != "train":
            images = images[:limit]
        pool, preds = pool_activations_and_predictions(model, images)
        pixels = images.reshape(images.shape[0], -1)
        export.write_table(out_dir / name, pixels, pool, preds)
        tables[name] = {
            "rows": int(images.shape[0]),
            "predicted_class_counts": {
                str(d): int(c) for d, c in enumerate(np.bincount(preds, minlength=10))
            },
        }

    export.write_dependency_map(out_dir / "depmap.json")

    bundle = {
        "tool": {"name": "bitp-model-adapter", "version": __version__},
        "seed": seed,
        "training": {
            # the architecture is fixed; schedule and augmentation are desk-scale
            # choices recorded here rather than tuned claims
            "epochs": epochs,
            "batch_size": batch_size,
            "augmentation": "4-direction 1px shifts (5x)" if augment else "none",
            "mining_table_augmented": augment_mining_table,
            "train_rows": int(splits.train_images.shape[0]),
            "seconds": round(train_seconds, 2),
        },
        "test_accuracy": round(accuracy, 4),
        "accuracy_floor": ACCURACY_FLOOR,
        "accuracy_warning": accuracy < ACCURACY_FLOOR,
        "tables": tables,
        "columns": {"input": 784, "pool": 13 * 13 * 28, "output": 1},
    }
    (out_dir / "bundle.json").write_text(json.dumps(bundle, indent=1, sort_keys=True) + "\n")
    return bundle


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bitp-model-adapter")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    p = sub.add_parser("train-and-export", help="train the CNN and export activation tables")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=20260810)
    p.add_argument("--epochs", type=int, default=12)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--limit", type=int, default=None, help="truncate each exported table to N rows")
    p.add_argument("--archive", default=None, help="alternate digit archive (.npz)")
    p.add_argument("--no-augment", action="store_true")
    p.add_argument("--no-table-augment", action="store_true",
                   help="do not add shifted rows to the mining table")
    args = parser.parse_args(argv)

    bundle = train_and_export(
        args.out,
        seed=args.seed,
        epochs=args.epochs,
        batch_size=args.batch_size,
        limit=args.limit,
        archive_path=args.archive,
        augment=not args.no_augment,
        augment_mining_table=not args.no_table_augment,
    )
    if bundle["accuracy_warning"]:
        print(
            f"warning: test accuracy {bundle['test_accuracy']} below floor {ACCURACY_FLOOR}",
            file=sys.stderr,
        )
    print(json.dumps({"test_accuracy": bundle["test_accuracy"], "out": str(args.out)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
