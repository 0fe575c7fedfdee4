from __future__ import annotations

import numpy as np

from .core import GrayImage


def random_texture(width: int, height: int, seed: int, block: int = 1) -> np.ndarray:
    """High-contrast random texture; ``block`` > 1 repeats each sample in square tiles."""
    rng = np.random.default_rng(seed)
    coarse = rng.integers(0, 256, size=(-(-height // block), -(-width // block)), dtype=np.int64)
    tiles = np.repeat(np.repeat(coarse, block, axis=0), block, axis=1)
    return tiles[:height, :width].astype(np.uint8)


def synthetic_shifted_pair(
    width: int, height: int, shift: int, seed: int = 0, block: int = 1
) -> tuple[GrayImage, GrayImage]:
    """Rectified pair with constant disparity ``shift``: L(x, y) = R(x - shift, y)."""
    texture = random_texture(width + shift, height, seed, block)
    left = texture[:, :width]
    right = texture[:, shift : shift + width]
    return GrayImage(left), GrayImage(right)
