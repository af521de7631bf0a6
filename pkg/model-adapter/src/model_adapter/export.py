"""Writers for the miner's table formats (written directly, no miner import).

Each exported table directory holds ``metadata.json`` plus ``data.bin``
(magic ``BITP1`` then row-major little-endian float32; the class column is
stored as its category index).  Columns are the 784 input pixels, the 4,732
pool units, then the predicted class.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import geometry

BINARY_MAGIC = b"BITP1"


def _metadata_obj() -> dict:
    observables = []
    for i, name in enumerate(geometry.pixel_names()):
        observables.append(
            {"name": name, "range_kind": "real", "layer_tag": "input", "index_in_layer": i}
        )
    for i, name in enumerate(geometry.pool_names()):
        observables.append(
            {"name": name, "range_kind": "real", "layer_tag": "pool", "index_in_layer": i}
        )
    observables.append(
        {
            "name": "w",
            "range_kind": "categorical",
            "layer_tag": "output",
            "index_in_layer": 0,
            "categories": [str(d) for d in range(10)],
        }
    )
    return {"observables": observables}


def write_table(
    out_dir: Path,
    pixels: np.ndarray,   # (n, 784) float32 in [0, 1]
    pool: np.ndarray,     # (n, 4732) float32
    predicted: np.ndarray,  # (n,) int
) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = pixels.shape[0]
    if pool.shape != (n, geometry.POOL_SIDE**2 * geometry.CHANNELS):
        raise ValueError(f"pool block has shape {pool.shape}")
    if predicted.shape != (n,):
        raise ValueError(f"predictions have shape {predicted.shape}")
    (out_dir / "metadata.json").write_text(json.dumps(_metadata_obj(), indent=0) + "\n")
    grid = np.concatenate(
        [
            pixels.astype("<f4"),
            pool.astype("<f4"),
            predicted.astype("<f4").reshape(-1, 1),
        ],
        axis=1,
    )
    with open(out_dir / "data.bin", "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(grid.tobytes(order="C"))


def write_dependency_map(path: Path) -> None:
    Path(path).write_text(
        json.dumps(geometry.dependency_map(), indent=0, sort_keys=True) + "\n"
    )


def read_predicted_column(table_dir: Path) -> np.ndarray:
    """Predicted classes from an exported table (for picking premise rows)."""
    blob = (Path(table_dir) / "data.bin").read_bytes()
    flat = np.frombuffer(blob[len(BINARY_MAGIC):], dtype="<f4")
    width = 784 + geometry.POOL_SIDE**2 * geometry.CHANNELS + 1
    return flat.reshape(-1, width)[:, -1].astype(np.int32)
