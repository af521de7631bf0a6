"""Rendering of input-layer interpolants as portable pixmaps.

Each input-layer atom colors its pixel: magenta for an upper bound, yellow
for a lower bound; everything else is light green.  With a background
observation present, the class colors keep 75% weight and the grayscale
background shows through at 25%, all in integer arithmetic so output files
are byte-identical everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Observation
from .errors import EvaluationError, PixelConflictError
from .predicates import Conjunction

UNCONSTRAINED = 0
UPPER_BOUND = 1
LOWER_BOUND = 2

# class index -> RGB
_COLORS = {
    UNCONSTRAINED: (180, 220, 180),
    UPPER_BOUND: (192, 0, 160),
    LOWER_BOUND: (255, 240, 64),
}


@dataclass(frozen=True)
class PixelLayout:
    """Where each input observable sits in a width x height raster."""

    width: int
    height: int
    positions: dict[str, tuple[int, int]]

    def __post_init__(self):
        for name, (r, c) in self.positions.items():
            if not (0 <= r < self.height and 0 <= c < self.width):
                raise EvaluationError(f"layout places '{name}' outside the {self.width}x{self.height} raster")


def grid_layout(observables, width: int, height: int, layer_tag: str = "input") -> PixelLayout:
    """Row-major layout from each observable's index within ``layer_tag``."""
    positions = {}
    for obs in observables:
        if obs.layer_tag != layer_tag:
            continue
        idx = obs.index_in_layer
        if idx >= width * height:
            raise EvaluationError(f"'{obs.name}' has index {idx}, beyond a {width}x{height} raster")
        positions[obs.name] = (idx // width, idx % width)
    if not positions:
        raise EvaluationError(f"no observables found with layer tag '{layer_tag}'")
    return PixelLayout(width, height, positions)


@dataclass(frozen=True)
class PixelClassMap:
    layout: PixelLayout
    classes: np.ndarray  # (height, width) uint8 of class indices

    @property
    def width(self) -> int:
        return self.layout.width

    @property
    def height(self) -> int:
        return self.layout.height

    def count(self, cls: int) -> int:
        return int(np.count_nonzero(self.classes == cls))


def classify_pixels(interpolant: Conjunction, layout: PixelLayout) -> PixelClassMap:
    """Map each atom to its pixel's class; a pixel may not carry both bound kinds."""
    classes = np.full((layout.height, layout.width), UNCONSTRAINED, dtype=np.uint8)
    for atom in interpolant.atoms:
        if atom.relation == "eq":
            raise EvaluationError(f"cannot render equality atom on '{atom.observable}'")
        if atom.observable not in layout.positions:
            raise EvaluationError(f"atom observable '{atom.observable}' is not in the pixel layout")
        r, c = layout.positions[atom.observable]
        cls = UPPER_BOUND if atom.relation == "le" else LOWER_BOUND
        prior = classes[r, c]
        if prior != UNCONSTRAINED and prior != cls:
            raise PixelConflictError(
                f"pixel ({r}, {c}) ('{atom.observable}') has both an upper and a lower bound"
            )
        classes[r, c] = cls
    classes.setflags(write=False)
    return PixelClassMap(layout, classes)


def _background_gray(map_: PixelClassMap, background: Observation) -> np.ndarray:
    gray = np.zeros((map_.height, map_.width), dtype=np.int64)
    for name, (r, c) in map_.layout.positions.items():
        v = background.value(name)
        if isinstance(v, str):
            raise EvaluationError(f"background value for '{name}' is not numeric")
        v = min(max(float(v), 0.0), 1.0)
        gray[r, c] = int(v * 255.0 + 0.5)
    return gray


def write_image(map_: PixelClassMap, background: Observation | None, out_path) -> None:
    """Write a binary PPM (P6); byte-identical output on every platform."""
    rgb = np.zeros((map_.height, map_.width, 3), dtype=np.int64)
    for cls, color in _COLORS.items():
        rgb[map_.classes == cls] = color
    if background is not None:
        gray = _background_gray(map_, background)
        # integer blend: 75% class color, 25% background, round half up
        rgb = (3 * rgb + gray[:, :, None] + 2) // 4
    header = f"P6\n{map_.width} {map_.height}\n255\n".encode("ascii")
    Path(out_path).write_bytes(header + rgb.astype(np.uint8).tobytes(order="C"))
