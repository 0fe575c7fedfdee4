"""Median filtering and the row-wise strategies that fill non-GCP pixels.

Every fill looks, along the pixel's own row, for the closest valid disparity
on the left (distance ``i``) and on the right (distance ``j``). Pixels with
only one such neighbour copy it. Rows with no valid pixel at all are filled
afterwards from the previous valid pixel in raster order (or the first valid
pixel of the map for a leading run).
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .core import INVALID, DisparityMap, GrayImage, require_same_shape
from .errors import ParamsError
from .models import FillStrategy
from .parallel import WorkerPool, serial_pool


def median3x3(d: DisparityMap) -> DisparityMap:
    height, width = d.shape
    padded = np.pad(d.data, 1, mode="edge")
    stack = np.stack(
        [padded[j : j + height, i : i + width] for j in range(3) for i in range(3)]
    )
    # INVALID is +inf, so it sorts behind every valid neighbour.
    stack.sort(axis=0)
    count = np.isfinite(stack).sum(axis=0)
    lower_middle = np.maximum(count - 1, 0) // 2
    median = np.take_along_axis(stack, lower_middle[None], axis=0)[0]
    return DisparityMap(np.where(d.valid_mask(), median, INVALID))


class _Flanks:
    """Closest valid disparities to the left and right of each pixel in a band of rows."""

    def __init__(self, rows: np.ndarray) -> None:
        height, width = rows.shape
        valid = np.isfinite(rows)
        columns = np.broadcast_to(np.arange(width), (height, width))
        left_idx = np.maximum.accumulate(np.where(valid, columns, -1), axis=1)
        right_idx = np.minimum.accumulate(np.where(valid, columns, width)[:, ::-1], axis=1)[
            :, ::-1
        ]
        row_idx = np.broadcast_to(np.arange(height)[:, None], (height, width))
        self.missing = ~valid
        self.has_left = left_idx >= 0
        self.has_right = right_idx < width
        self.left_col = np.clip(left_idx, 0, width - 1)
        self.right_col = np.clip(right_idx, 0, width - 1)
        self.left = np.where(self.has_left, rows[row_idx, self.left_col], 0.0)
        self.right = np.where(self.has_right, rows[row_idx, self.right_col], 0.0)
        self.i = (columns - left_idx).astype(np.float64)
        self.j = (right_idx - columns).astype(np.float64)
        self.row_idx = row_idx
        self.columns = columns


BothSidesRule = Callable[[_Flanks, "np.ndarray | None"], np.ndarray]


def _fill(
    d: DisparityMap,
    base: GrayImage | None,
    rule: BothSidesRule,
    pool: WorkerPool | None,
) -> DisparityMap:
    if base is not None:
        require_same_shape(d.data, base.data, "disparity map vs base image")
    out = np.array(d.data, dtype=np.float64)
    brightness = None if base is None else base.data.astype(np.int16)

    def band(start: int, stop: int) -> None:
        rows = out[start:stop]
        flanks = _Flanks(rows)
        both = flanks.missing & flanks.has_left & flanks.has_right
        only_left = flanks.missing & flanks.has_left & ~flanks.has_right
        only_right = flanks.missing & ~flanks.has_left & flanks.has_right
        band_base = None if brightness is None else brightness[start:stop]
        with np.errstate(divide="ignore", invalid="ignore"):
            value = rule(flanks, band_base)
        rows[both] = value[both]
        rows[only_left] = flanks.left[only_left]
        rows[only_right] = flanks.right[only_right]

    (pool or serial_pool()).run_bands(band, d.height)
    return DisparityMap(_fill_empty_rows(out))


def _fill_empty_rows(data: np.ndarray) -> np.ndarray:
    flat = data.ravel()
    valid = np.isfinite(flat)
    if valid.all() or not valid.any():
        return data
    positions = np.arange(flat.size)
    previous = np.maximum.accumulate(np.where(valid, positions, -1))
    source = np.where(previous >= 0, previous, int(np.argmax(valid)))
    return flat[source].reshape(data.shape)


def _interpolate(flanks: _Flanks) -> np.ndarray:
    return flanks.left + flanks.i * ((flanks.right - flanks.left) / (flanks.i + flanks.j))


def _edge_side(flanks: _Flanks, brightness: np.ndarray) -> np.ndarray:
    center = brightness
    to_left = np.abs(brightness[flanks.row_idx, flanks.left_col] - center)
    to_right = np.abs(brightness[flanks.row_idx, flanks.right_col] - center)
    return np.where(to_left <= to_right, flanks.left, flanks.right)


def fill_bilateral(
    d: DisparityMap,
    base: GrayImage,
    t_fill: float,
    pool: WorkerPool | None = None,
) -> DisparityMap:
    def rule(flanks: _Flanks, brightness: np.ndarray) -> np.ndarray:
        continuous = np.abs(flanks.left - flanks.right) <= t_fill
        return np.where(continuous, _interpolate(flanks), _edge_side(flanks, brightness))

    return _fill(d, base, rule, pool)


def fill_extrapolate(
    d: DisparityMap,
    base: GrayImage,
    t_fill: float,
    clip_max: float | None = None,
    pool: WorkerPool | None = None,
) -> DisparityMap:
    """Bilateral fill whose continuous case steps away from the right flank.

    Results are clipped into ``[0, clip_max]``.
    """

    def rule(flanks: _Flanks, brightness: np.ndarray) -> np.ndarray:
        stepped = flanks.left + flanks.i * ((flanks.left - flanks.right) / (flanks.i + flanks.j))
        stepped = np.clip(stepped, 0.0, np.inf if clip_max is None else clip_max)
        continuous = np.abs(flanks.left - flanks.right) <= t_fill
        return np.where(continuous, stepped, _edge_side(flanks, brightness))

    return _fill(d, base, rule, pool)


def fill_nearest(d: DisparityMap, pool: WorkerPool | None = None) -> DisparityMap:
    def rule(flanks: _Flanks, _brightness: np.ndarray | None) -> np.ndarray:
        return np.where(flanks.i <= flanks.j, flanks.left, flanks.right)

    return _fill(d, None, rule, pool)


def fill_smaller(d: DisparityMap, pool: WorkerPool | None = None) -> DisparityMap:
    def rule(flanks: _Flanks, _brightness: np.ndarray | None) -> np.ndarray:
        return np.minimum(flanks.left, flanks.right)

    return _fill(d, None, rule, pool)


def fill_non_gcp(
    d: DisparityMap,
    base: GrayImage,
    strategy: FillStrategy,
    t_fill: float,
    clip_max: float,
    pool: WorkerPool | None = None,
) -> DisparityMap:
    if strategy == "bilateral":
        return fill_bilateral(d, base, t_fill, pool)
    if strategy == "extrapolate":
        return fill_extrapolate(d, base, t_fill, clip_max, pool)
    if strategy == "nearest":
        return fill_nearest(d, pool)
    if strategy == "smaller":
        return fill_smaller(d, pool)
    raise ParamsError(f"Unknown fill strategy: {strategy}")
