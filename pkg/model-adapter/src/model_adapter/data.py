"""The bundled 10,000-image digit subset and its fixed splits.

The archive holds genuine 28x28 grayscale digits (uint8) with labels, already
deterministically shuffled.  Desk-scale splits: the first 8,000 images train
the model; of those, the first 4,000 form the mining table and the remaining
4,000 the held-out evaluation table; the last 2,000 images are the test set.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_ARCHIVE = Path(__file__).resolve().parents[2] / "data" / "mnist10k.npz"

N_TRAIN = 8000
N_MINE = 4000


@dataclass(frozen=True)
class Splits:
    train_images: np.ndarray  # (n, 28, 28, 1) float32 in [0, 1]
    train_labels: np.ndarray
    test_images: np.ndarray
    test_labels: np.ndarray

    @property
    def mine_slice(self) -> slice:
        return slice(0, N_MINE)

    @property
    def heldout_slice(self) -> slice:
        return slice(N_MINE, len(self.train_images))


def load_splits(archive_path=None) -> Splits:
    path = Path(archive_path) if archive_path else DEFAULT_ARCHIVE
    if not path.exists():
        raise FileNotFoundError(
            f"digit archive not found at {path}; see model-adapter/README.md for how to rebuild it"
        )
    blob = np.load(path)
    images = blob["images"].astype(np.float32) / 255.0
    labels = blob["labels"].astype(np.int32)
    if images.shape[1] != 784:
        raise ValueError(f"expected 784-pixel rows, got {images.shape}")
    images = images.reshape(-1, 28, 28, 1)
    return Splits(
        train_images=images[:N_TRAIN],
        train_labels=labels[:N_TRAIN],
        test_images=images[N_TRAIN:],
        test_labels=labels[N_TRAIN:],
    )


def shifted_variants(images: np.ndarray) -> list[np.ndarray]:
    """The images themselves plus their four one-pixel translations."""

    def shift(x, dr, dc):
        out = np.zeros_like(x)
        rs = slice(max(dr, 0), 28 + min(dr, 0))
        rd = slice(max(-dr, 0), 28 + min(-dr, 0))
        cs = slice(max(dc, 0), 28 + min(dc, 0))
        cd = slice(max(-dc, 0), 28 + min(-dc, 0))
        out[:, rd, cd] = x[:, rs, cs]
        return out

    return [images] + [shift(images, dr, dc) for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1))]


def shift_augment(images: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Original images plus the four one-pixel translations (5x the data).

    Substitutes for training-set volume at desk scale; the model architecture
    is unchanged.
    """
    shifted = shifted_variants(images)
    return np.concatenate(shifted), np.concatenate([labels] * len(shifted))
