from __future__ import annotations

import math

import numpy as np

from .core import INVALID, DisparityMap, GrayImage, effective_scale
from .errors import DimensionError, ParamsError, ValueRangeError
from .models import Params
from .parallel import WorkerPool, serial_pool
from .refine import fill_bilateral


def scale_up(
    d: DisparityMap,
    base_org: GrayImage,
    params: Params,
    pool: WorkerPool | None = None,
) -> DisparityMap:
    """Bring a working-resolution map back to the size of ``base_org``.

    Values are multiplied by K and seeded on the even grid. Seeded rows are
    completed with the bilateral rule against full-resolution brightness
    (continuity threshold K*T); the rows in between are linear blends of the
    seeded rows above and below.
    """
    k = effective_scale(params)
    height, width = base_org.shape
    small_h, small_w = d.shape
    if height // k != small_h or width // k != small_w:
        raise DimensionError(
            f"cannot scale {small_w}x{small_h} by {k} to {width}x{height}"
        )
    if k == 1:
        return d

    pool = pool or serial_pool()
    seeded = np.full((small_h, width), INVALID)
    seeded[:, 0 : k * small_w : k] = d.data * k
    base_rows = GrayImage(base_org.data[0 : k * small_h : k])
    rows = fill_bilateral(DisparityMap(seeded), base_rows, k * params.t_fill, pool).data

    out = np.empty((height, width), dtype=np.float64)

    def band(start: int, stop: int) -> None:
        for y in range(start, stop):
            s = min(y // k, small_h - 1)
            offset = y - s * k
            if offset == 0 or s + 1 >= small_h:
                out[y] = rows[s]
                continue
            out[y] = _blend(rows[s], rows[s + 1], offset, k - offset)

    pool.run_bands(band, height)
    return DisparityMap(out)


def _blend(above: np.ndarray, below: np.ndarray, i: int, j: int) -> np.ndarray:
    has_above = np.isfinite(above)
    has_below = np.isfinite(below)
    a = np.where(has_above, above, 0.0)
    b = np.where(has_below, below, 0.0)
    linear = a + i * ((b - a) / (i + j))
    return np.where(
        has_above & has_below,
        linear,
        np.where(has_above, above, np.where(has_below, below, INVALID)),
    )


def disparity_to_depth(d: float, f: float, baseline: float) -> float:
    if f <= 0 or baseline <= 0:
        raise ParamsError("focal length and baseline must be > 0")
    if d < 0:
        raise ValueRangeError("disparity must be >= 0")
    if d == 0:
        return math.inf
    return f * baseline / d


def depth_map(
    d: DisparityMap, f: float, baseline: float, doffs: float = 0.0
) -> np.ndarray:
    """Per-pixel depth; INVALID and zero effective disparity map to +inf."""
    if f <= 0 or baseline <= 0:
        raise ParamsError("focal length and baseline must be > 0")
    shifted = d.data + doffs
    with np.errstate(divide="ignore", invalid="ignore"):
        depth = f * baseline / shifted
    return np.where(np.isfinite(shifted) & (shifted > 0), depth, math.inf)
