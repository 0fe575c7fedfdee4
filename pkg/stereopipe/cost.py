"""Per-pixel matching cost: brightness AD term plus mini-census Hamming term.

The cost volume is never materialized; callers ask for one disparity at a
time. Both exponential terms only ever see 256 (AD) or 7 (census) distinct
arguments, so they are tabulated once per lambda with ``math.exp`` and the
vectorized path reads the very same doubles the scalar path computes.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import BORDER_COST, CensusMap, CostSlice, GrayImage, require_same_shape
from .errors import ValueRangeError
from .models import Params
from .parallel import WorkerPool, serial_pool

_POPCOUNT = np.array([bin(code).count("1") for code in range(64)], dtype=np.int64)


def mini_census(img: GrayImage, offsets: Sequence[tuple[int, int]]) -> CensusMap:
    reach_x = max(abs(dx) for dx, _ in offsets)
    reach_y = max(abs(dy) for _, dy in offsets)
    padded = np.pad(img.data, ((reach_y, reach_y), (reach_x, reach_x)), mode="edge")
    center = img.data
    codes = np.zeros(img.shape, dtype=np.uint8)
    for bit, (dx, dy) in enumerate(offsets):
        neighbor = padded[
            reach_y + dy : reach_y + dy + img.height,
            reach_x + dx : reach_x + dx + img.width,
        ]
        codes |= (neighbor < center).astype(np.uint8) << bit
    return CensusMap(codes)


def hamming6(a: int, b: int) -> int:
    if not (0 <= a < 64 and 0 <= b < 64):
        raise ValueRangeError(f"census codes must be 6-bit, got {a} and {b}")
    return (a ^ b).bit_count()


def cost_ad(l: int, r: int, lambda_ad: float) -> float:
    return 1.0 - math.exp(-(abs(int(l) - int(r)) / 255.0) / lambda_ad)


def cost_mc(hd: int, lambda_mc: float) -> float:
    return 1.0 - math.exp(-hd / lambda_mc)


@lru_cache(maxsize=32)
def _ad_table(lambda_ad: float) -> np.ndarray:
    table = np.array([cost_ad(diff, 0, lambda_ad) for diff in range(256)], dtype=np.float64)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=32)
def _mc_table(lambda_mc: float) -> np.ndarray:
    table = np.array([cost_mc(hd, lambda_mc) for hd in range(7)], dtype=np.float64)
    table.setflags(write=False)
    return table


def cost_slice_left(
    l: GrayImage,
    r: GrayImage,
    census_l: CensusMap,
    census_r: CensusMap,
    d: int,
    params: Params,
    pool: WorkerPool | None = None,
) -> CostSlice:
    require_same_shape(l.data, r.data, "left/right images")
    require_same_shape(l.data, census_l.data, "left census")
    require_same_shape(r.data, census_r.data, "right census")
    width = l.width
    ad = _ad_table(params.lambda_ad)
    mc = _mc_table(params.lambda_mc)
    out = np.full(l.shape, BORDER_COST, dtype=np.float64)

    if d < width:
        left = l.data.astype(np.int16)
        right = r.data.astype(np.int16)

        def band(start: int, stop: int) -> None:
            diff = np.abs(left[start:stop, d:] - right[start:stop, : width - d])
            codes = census_l.data[start:stop, d:] ^ census_r.data[start:stop, : width - d]
            out[start:stop, d:] = ad[diff] + mc[_POPCOUNT[codes]]

        (pool or serial_pool()).run_bands(band, l.height)
    return CostSlice(d, out)


def right_cost_from_left(left_slice: CostSlice, d: int) -> CostSlice:
    """Right-base costs for disparity ``d``: C^R(x, y, d) = C^L(x + d, y, d)."""
    width = left_slice.width
    out = np.full(left_slice.shape, BORDER_COST, dtype=np.float64)
    if d < width:
        out[:, : width - d] = left_slice.data[:, d:]
    return CostSlice(d, out)
