"""Array-backed domain types and parameter checks shared by every stage.

All images and maps are 2-D numpy arrays indexed ``[y, x]`` (row-major).
Instances are frozen and their arrays are marked read-only, so they can be
handed to worker threads without copying.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DimensionError, ParamsError, ValueRangeError
from .models import Params

INVALID = math.inf
BORDER_COST = 2.0


def _frozen_array(data: Any, dtype: Any, name: str) -> np.ndarray:
    array = np.array(data, dtype=dtype)
    if array.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {array.shape}")
    if array.shape[0] < 1 or array.shape[1] < 1:
        raise DimensionError(f"{name} must be at least 1x1, got shape {array.shape}")
    array.setflags(write=False)
    return array


def require_same_shape(first: np.ndarray, second: np.ndarray, what: str) -> None:
    if first.shape != second.shape:
        raise DimensionError(f"{what}: shape {first.shape} does not match {second.shape}")


class _Grid:
    data: np.ndarray

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)


@dataclass(frozen=True, slots=True)
class GrayImage(_Grid):
    data: np.ndarray

    def __post_init__(self) -> None:
        raw = np.asarray(self.data)
        if raw.size and (raw.min() < 0 or raw.max() > 255):
            raise ValueRangeError("GrayImage brightness must lie in [0, 255]")
        object.__setattr__(self, "data", _frozen_array(raw, np.uint8, "GrayImage"))


@dataclass(frozen=True, slots=True)
class CensusMap(_Grid):
    data: np.ndarray

    def __post_init__(self) -> None:
        array = _frozen_array(self.data, np.uint8, "CensusMap")
        if int(array.max()) >= 64:
            raise ValueRangeError("census codes must be < 64")
        object.__setattr__(self, "data", array)


@dataclass(frozen=True, slots=True)
class CostSlice(_Grid):
    d: int
    data: np.ndarray

    def __post_init__(self) -> None:
        array = _frozen_array(self.data, np.float64, "CostSlice")
        if not np.all(np.isfinite(array)) or float(array.min()) < 0.0:
            raise ValueRangeError(f"cost slice d={self.d} holds negative or non-finite costs")
        object.__setattr__(self, "data", array)


@dataclass(frozen=True, slots=True)
class ArmTable(_Grid):
    minus: np.ndarray
    plus: np.ndarray

    def __post_init__(self) -> None:
        minus = _frozen_array(self.minus, np.int32, "ArmTable.minus")
        plus = _frozen_array(self.plus, np.int32, "ArmTable.plus")
        require_same_shape(minus, plus, "ArmTable")
        object.__setattr__(self, "minus", minus)
        object.__setattr__(self, "plus", plus)

    @property
    def data(self) -> np.ndarray:  # type: ignore[override]
        return self.plus


@dataclass(frozen=True, slots=True)
class DisparityMap(_Grid):
    data: np.ndarray

    def __post_init__(self) -> None:
        array = _frozen_array(self.data, np.float64, "DisparityMap")
        if not np.all((array >= 0.0) | np.isposinf(array)):
            raise ValueRangeError("disparities must be non-negative reals or INVALID")
        object.__setattr__(self, "data", array)

    def valid_mask(self) -> np.ndarray:
        return np.isfinite(self.data)


@dataclass(frozen=True, slots=True)
class GcpMask(_Grid):
    data: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", _frozen_array(self.data, np.bool_, "GcpMask"))

    def fraction(self) -> float:
        return float(self.data.mean())


def effective_scale(params: Params) -> int:
    return params.k_scale if params.downscale else 1


def scaled_max_disparity(params: Params) -> int:
    if params.d_max_org < 1:
        raise ParamsError("d_max_org must be >= 1")
    return -(-params.d_max_org // params.k_scale)


def search_range(params: Params) -> int:
    """Number of disparity candidates D searched at working resolution."""
    if not params.downscale:
        return params.d_max_org
    return scaled_max_disparity(params)


def validate(params: Params) -> None:
    checks: list[tuple[bool, str]] = [
        (params.lambda_ad > 0, "lambda_ad must be > 0"),
        (params.lambda_mc > 0, "lambda_mc must be > 0"),
        (params.delta_arm > 0, "delta_arm must be > 0"),
        (params.t_fill >= 0, "t_fill must be >= 0"),
        (params.w_x >= 0, "w_x must be >= 0"),
        (params.w_y >= 0, "w_y must be >= 0"),
        (params.right_w_x >= 0, "w_x_right must be >= 0"),
        (params.right_w_y >= 0, "w_y_right must be >= 0"),
        (params.k_scale >= 1, "k_scale must be >= 1"),
        (params.m_pool >= 0, "m_pool must be >= 0"),
        (params.d_max_org >= 1, "d_max_org must be >= 1"),
        (len(params.census_offsets) == 6, "census_offsets must have exactly 6 entries"),
        (
            len(set(params.census_offsets)) == len(params.census_offsets),
            "census_offsets must be distinct",
        ),
        ((0, 0) not in params.census_offsets, "census_offsets must be nonzero"),
        (params.cc_tolerance >= 0, "cc_tolerance must be >= 0"),
    ]
    for ok, message in checks:
        if not ok:
            raise ParamsError(message)
