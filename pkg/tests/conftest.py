from __future__ import annotations

import numpy as np
import pytest

from stereopipe.core import DisparityMap, GrayImage
from stereopipe.models import Params


def gray(rows: list[list[int]] | np.ndarray) -> GrayImage:
    return GrayImage(np.array(rows, dtype=np.int64))


def disparity(rows: list[list[float]] | np.ndarray) -> DisparityMap:
    return DisparityMap(np.array(rows, dtype=np.float64))


def random_gray(rng: np.random.Generator, width: int, height: int) -> GrayImage:
    return GrayImage(rng.integers(0, 256, size=(height, width)))


def random_params(rng: np.random.Generator, **overrides: object) -> Params:
    """Small random parameter draws that keep the scalar reference fast."""
    values: dict[str, object] = {
        "lambda_ad": float(rng.uniform(0.1, 1.0)),
        "lambda_mc": float(rng.uniform(0.5, 4.0)),
        "t_fill": float(rng.integers(0, 7)),
        "w_x": int(rng.integers(0, 9)),
        "w_y": int(rng.integers(0, 9)),
        "delta_arm": float(rng.integers(5, 80)),
        "k_scale": int(rng.integers(1, 4)),
        "m_pool": int(rng.integers(0, 3)),
        "d_max_org": int(rng.integers(1, 17)),
        "downscale": bool(rng.integers(0, 2)),
        "fill": str(rng.choice(["bilateral", "nearest", "smaller", "extrapolate"])),
    }
    values.update(overrides)
    return Params(**values)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def default_params() -> Params:
    return Params()
