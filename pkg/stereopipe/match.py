from __future__ import annotations

from typing import Iterable

import numpy as np

from .core import INVALID, CostSlice, DisparityMap, GcpMask, require_same_shape
from .errors import DimensionError


class WinnerTakeAll:
    """Running per-pixel minimum over cost slices fed in ascending ``d``.

    A later slice only wins on a strictly smaller cost, so ties keep the
    smallest disparity.
    """

    def __init__(self) -> None:
        self._best: np.ndarray | None = None
        self._disparity: np.ndarray | None = None

    def update(self, cost: CostSlice) -> None:
        if self._best is None or self._disparity is None:
            self._best = np.full(cost.shape, np.inf)
            self._disparity = np.zeros(cost.shape, dtype=np.float64)
        elif cost.shape != self._best.shape:
            raise DimensionError(
                f"cost slice d={cost.d} has shape {cost.shape}, expected {self._best.shape}"
            )
        better = cost.data < self._best
        np.copyto(self._best, cost.data, where=better)
        self._disparity[better] = cost.d

    def result(self) -> DisparityMap:
        if self._disparity is None:
            raise ValueError("winner-take-all needs at least one cost slice")
        return DisparityMap(self._disparity)


def wta_select(slices: Iterable[CostSlice]) -> DisparityMap:
    selector = WinnerTakeAll()
    for cost in slices:
        selector.update(cost)
    return selector.result()


def cross_check(dl: DisparityMap, dr: DisparityMap, tolerance: float = 0.0) -> GcpMask:
    require_same_shape(dl.data, dr.data, "left/right disparity maps")
    height, width = dl.shape
    valid = dl.valid_mask()
    k = np.where(valid, dl.data, 0.0).astype(np.int64)
    columns = np.arange(width)[None, :] - k
    inside = valid & (columns >= 0)
    rows = np.broadcast_to(np.arange(height)[:, None], (height, width))
    partner = dr.data[rows, np.clip(columns, 0, width - 1)]
    consistent = np.abs(partner - k) <= tolerance
    return GcpMask(inside & consistent)


def apply_gcp_mask(d: DisparityMap, mask: GcpMask) -> DisparityMap:
    require_same_shape(d.data, mask.data, "disparity map vs GCP mask")
    return DisparityMap(np.where(mask.data, d.data, INVALID))
