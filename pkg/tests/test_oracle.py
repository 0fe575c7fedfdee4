from __future__ import annotations

import numpy as np
import pytest

from stereopipe.cost import cost_slice_left, mini_census, right_cost_from_left
from stereopipe.engine import run_pipeline
from stereopipe.models import Params
from stereopipe.oracle import oracle_census, oracle_cost_right, oracle_downscale, oracle_pipeline
from stereopipe.preprocess import mean_pool_downscale
from stereopipe.synthetic import synthetic_shifted_pair

from conftest import random_gray, random_params


def _instance(seed: int):
    rng = np.random.default_rng(seed)
    if seed % 20 == 0:
        width, height = 64, 48
        params = random_params(rng, downscale=True, k_scale=2, w_x=4, w_y=4)
    else:
        width, height = int(rng.integers(8, 25)), int(rng.integers(6, 17))
        params = random_params(rng)
    if seed % 3 == 0:
        # blocky texture gives long arms and real GCP structure
        left, right = synthetic_shifted_pair(width, height, int(rng.integers(0, 5)), seed, block=3)
    else:
        left, right = random_gray(rng, width, height), random_gray(rng, width, height)
    return left, right, params


@pytest.mark.parametrize("seed", range(120))
def test_pipeline_matches_scalar_reference_at_every_stage(seed: int) -> None:
    left, right, params = _instance(seed)
    result = run_pipeline(left, right, params, workers=1 + seed % 3)
    trace = oracle_pipeline(left, right, params)
    out = result.outputs

    np.testing.assert_array_equal(out["left"].data, trace.left)
    np.testing.assert_array_equal(out["right"].data, trace.right)
    for name in ("arms_x_left", "arms_x_right", "arms_y_left", "arms_y_right"):
        minus, plus = getattr(trace, name)
        np.testing.assert_array_equal(out[name].minus, minus, err_msg=name)
        np.testing.assert_array_equal(out[name].plus, plus, err_msg=name)
    np.testing.assert_array_equal(out["dl"].data, trace.dl)
    np.testing.assert_array_equal(out["dr"].data, trace.dr)
    np.testing.assert_array_equal(out["mask"].data, trace.mask)
    np.testing.assert_array_equal(out["masked"].data, trace.masked)
    np.testing.assert_array_equal(out["median"].data, trace.median)
    np.testing.assert_array_equal(out["refined"].data, trace.refined)
    np.testing.assert_array_equal(result.disparity.data, trace.disparity.data)
    assert result.disparity.shape == left.shape


@pytest.mark.parametrize("seed", range(20))
def test_right_cost_reuse_equals_direct_computation(seed: int) -> None:
    rng = np.random.default_rng(1000 + seed)
    width, height = int(rng.integers(6, 30)), int(rng.integers(3, 12))
    left, right = random_gray(rng, width, height), random_gray(rng, width, height)
    params = random_params(rng)
    census_l = mini_census(left, params.census_offsets)
    census_r = mini_census(right, params.census_offsets)
    for d in range(int(rng.integers(1, 12))):
        reused = right_cost_from_left(
            cost_slice_left(left, right, census_l, census_r, d, params), d
        )
        direct = oracle_cost_right(
            left.data.tolist(),
            right.data.tolist(),
            census_l.data.tolist(),
            census_r.data.tolist(),
            d,
            params,
        )
        np.testing.assert_array_equal(reused.data, np.array(direct))


def test_reference_census_and_downscale_agree_with_kernels(rng: np.random.Generator) -> None:
    img = random_gray(rng, 21, 15)
    params = Params()
    np.testing.assert_array_equal(
        mini_census(img, params.census_offsets).data,
        np.array(oracle_census(img.data.tolist(), params.census_offsets)),
    )
    np.testing.assert_array_equal(
        mean_pool_downscale(img, 2, 1).data, np.array(oracle_downscale(img.data.tolist(), 2, 1))
    )


def test_identical_views_give_zero_disparity_away_from_borders(rng: np.random.Generator) -> None:
    img = random_gray(rng, 16, 16)
    trace = oracle_pipeline(img, img, Params(d_max_org=4, downscale=False, w_x=2, w_y=2))
    assert (trace.disparity.data[2:-2, 2:-2] == 0.0).all()


def test_shifted_views_recover_the_shift() -> None:
    left, right = synthetic_shifted_pair(24, 12, 3, seed=7)
    trace = oracle_pipeline(left, right, Params(d_max_org=8, downscale=False, w_x=2, w_y=2))
    interior = trace.disparity.data[2:-2, 8:-2]
    assert (interior == 3.0).mean() >= 0.95
