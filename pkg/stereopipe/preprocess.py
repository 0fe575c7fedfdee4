from __future__ import annotations

import numpy as np

from .core import GrayImage
from .errors import DimensionError
from .parallel import WorkerPool, serial_pool

# BT.601 luma weights in thousandths.
_LUMA = (299, 587, 114)


def to_gray(rgb: np.ndarray) -> GrayImage:
    """Convert an ``(H, W, 3)`` RGB array, or pass a ``(H, W)`` gray array through.

    Rounds half up in integer arithmetic so the result is platform independent.
    """
    array = np.asarray(rgb)
    if array.ndim == 2:
        return GrayImage(array)
    if array.ndim != 3 or array.shape[2] != 3:
        raise DimensionError(f"expected an (H, W, 3) RGB array, got shape {array.shape}")
    channels = array.astype(np.int64)
    weighted = (
        _LUMA[0] * channels[..., 0] + _LUMA[1] * channels[..., 1] + _LUMA[2] * channels[..., 2]
    )
    gray = (weighted + 500) // 1000
    return GrayImage(np.clip(gray, 0, 255))


def mean_pool_downscale(
    img: GrayImage,
    k_scale: int,
    m_pool: int,
    pool: WorkerPool | None = None,
) -> GrayImage:
    out_h = img.height // k_scale
    out_w = img.width // k_scale
    if out_h < 1 or out_w < 1:
        raise DimensionError(
            f"image {img.width}x{img.height} is too small for scale factor {k_scale}"
        )
    side = 2 * m_pool + 1
    count = side * side
    padded = np.pad(img.data.astype(np.int64), m_pool, mode="edge")
    out = np.empty((out_h, out_w), dtype=np.int64)

    def band(start: int, stop: int) -> None:
        acc = np.zeros((stop - start, out_w), dtype=np.int64)
        for j in range(side):
            rows = padded[k_scale * start + j : k_scale * (stop - 1) + j + 1 : k_scale]
            for i in range(side):
                acc += rows[:, i : k_scale * (out_w - 1) + i + 1 : k_scale]
        out[start:stop] = (2 * acc + count) // (2 * count)

    (pool or serial_pool()).run_bands(band, out_h)
    return GrayImage(out)
