from __future__ import annotations

import numpy as np

from .core import ArmTable, CostSlice, GrayImage, require_same_shape
from .parallel import WorkerPool, serial_pool


def _arms_along_rows(
    data: np.ndarray, delta_arm: float, cap: int, pool: WorkerPool
) -> tuple[np.ndarray, np.ndarray]:
    height, width = data.shape
    values = data.astype(np.int16)
    minus = np.zeros((height, width), dtype=np.int32)
    plus = np.zeros((height, width), dtype=np.int32)
    reach = min(cap, width - 1)

    def band(start: int, stop: int) -> None:
        rows = values[start:stop]
        alive_plus = np.ones(rows.shape, dtype=bool)
        alive_minus = np.ones(rows.shape, dtype=bool)
        for dx in range(1, reach + 1):
            similar = np.abs(rows[:, dx:] - rows[:, : width - dx]) < delta_arm
            alive_plus[:, width - dx] = False
            alive_plus[:, : width - dx] &= similar
            alive_minus[:, dx - 1] = False
            alive_minus[:, dx:] &= similar
            if not (alive_plus.any() or alive_minus.any()):
                break
            plus[start:stop] += alive_plus
            minus[start:stop] += alive_minus

    pool.run_bands(band, height)
    return minus, plus


def arms_horizontal(
    img: GrayImage, delta_arm: float, w_x: int, pool: WorkerPool | None = None
) -> ArmTable:
    minus, plus = _arms_along_rows(img.data, delta_arm, w_x, pool or serial_pool())
    return ArmTable(minus, plus)


def arms_vertical(
    img: GrayImage, delta_arm: float, w_y: int, pool: WorkerPool | None = None
) -> ArmTable:
    minus, plus = _arms_along_rows(img.data.T, delta_arm, w_y, pool or serial_pool())
    return ArmTable(minus.T, plus.T)


def _sum_along_rows(
    src: np.ndarray,
    minus: np.ndarray,
    plus: np.ndarray,
    out: np.ndarray,
    start: int,
    stop: int,
) -> None:
    # Per pixel: center, then +1..+n, then -1..-m. Masked-off lanes add
    # nothing, so this matches a scalar loop in that order bit for bit.
    width = src.shape[1]
    rows = src[start:stop]
    acc = out[start:stop]
    acc[...] = rows
    band_plus = plus[start:stop]
    band_minus = minus[start:stop]
    for dx in range(1, int(band_plus.max(initial=0)) + 1):
        target = acc[:, : width - dx]
        np.add(target, rows[:, dx:], out=target, where=band_plus[:, : width - dx] >= dx)
    for dx in range(1, int(band_minus.max(initial=0)) + 1):
        target = acc[:, dx:]
        np.add(target, rows[:, : width - dx], out=target, where=band_minus[:, dx:] >= dx)


def aggregate_x(
    cost: CostSlice, arms: ArmTable, pool: WorkerPool | None = None
) -> CostSlice:
    require_same_shape(cost.data, arms.plus, "cost slice vs horizontal arms")
    out = np.empty(cost.shape, dtype=np.float64)

    def band(start: int, stop: int) -> None:
        _sum_along_rows(cost.data, arms.minus, arms.plus, out, start, stop)

    (pool or serial_pool()).run_bands(band, cost.height)
    return CostSlice(cost.d, out)


def aggregate_y(
    x_cost: CostSlice, arms: ArmTable, pool: WorkerPool | None = None
) -> CostSlice:
    require_same_shape(x_cost.data, arms.plus, "cost slice vs vertical arms")
    out = np.empty(x_cost.shape, dtype=np.float64)
    src_t, minus_t, plus_t, out_t = x_cost.data.T, arms.minus.T, arms.plus.T, out.T

    def band(start: int, stop: int) -> None:
        _sum_along_rows(src_t, minus_t, plus_t, out_t, start, stop)

    (pool or serial_pool()).run_bands(band, x_cost.width)
    return CostSlice(x_cost.d, out)
