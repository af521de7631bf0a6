"""Receptive-field geometry of the conv + max-pool stack.

A valid 3x3 convolution on 28x28 gives 26x26 units; 2x2 max-pooling halves
that to 13x13.  Pool unit (r, c) therefore reads conv rows 2r..2r+1 and
columns 2c..2c+1, which in turn read the input patch rows 2r..2r+3 and
columns 2c..2c+3 (clipped to the image; with this geometry every patch is a
full 4x4).
"""

from __future__ import annotations

INPUT_SIDE = 28
CONV_SIDE = 26
POOL_SIDE = 13
CHANNELS = 28


def pixel_name(r: int, c: int) -> str:
    return f"p_{r}_{c}"

def pool_name(r: int, c: int, ch: int) -> str:
    return f"u_{r}_{c}_{ch}"


def pixel_names() -> list[str]:
    return [pixel_name(r, c) for r in range(INPUT_SIDE) for c in range(INPUT_SIDE)]


def pool_names() -> list[str]:
    return [
        pool_name(r, c, ch)
        for r in range(POOL_SIDE)
        for c in range(POOL_SIDE)
        for ch in range(CHANNELS)
    ]


def patch_pixels(r: int, c: int) -> list[str]:
    """Input pixels that can influence pool unit (r, c), any channel."""
    if not (0 <= r < POOL_SIDE and 0 <= c < POOL_SIDE):
        raise ValueError(f"pool position ({r}, {c}) outside {POOL_SIDE}x{POOL_SIDE}")
    r0, c0 = 2 * r, 2 * c
    r1 = min(r0 + 3, INPUT_SIDE - 1)
    c1 = min(c0 + 3, INPUT_SIDE - 1)
    return [pixel_name(i, j) for i in range(r0, r1 + 1) for j in range(c0, c1 + 1)]


def dependency_map() -> dict[str, list[str]]:
    out = {}
    for r in range(POOL_SIDE):
        for c in range(POOL_SIDE):
            pixels = patch_pixels(r, c)
            for ch in range(CHANNELS):
                out[pool_name(r, c, ch)] = pixels
    return out
