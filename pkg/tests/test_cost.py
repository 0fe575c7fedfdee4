from __future__ import annotations

import math

import numpy as np
import pytest

from stereopipe.core import BORDER_COST
from stereopipe.cost import (
    cost_ad,
    cost_mc,
    cost_slice_left,
    hamming6,
    mini_census,
    right_cost_from_left,
)
from stereopipe.models import DEFAULT_CENSUS_OFFSETS, Params
from stereopipe.parallel import WorkerPool

from conftest import gray, random_gray


def test_constant_image_has_all_zero_codes() -> None:
    codes = mini_census(gray(np.full((6, 6), 42)), DEFAULT_CENSUS_OFFSETS)
    assert not codes.data.any()


def test_bright_center_sets_every_bit() -> None:
    img = np.full((5, 5), 100)
    img[2, 2] = 200
    codes = mini_census(gray(img), DEFAULT_CENSUS_OFFSETS)
    assert int(codes.data[2, 2]) == 0b111111


def test_ramp_sets_bits_for_darker_offsets_only() -> None:
    ramp = [[10 * x + y for x in range(5)] for y in range(5)]
    codes = mini_census(gray(ramp), DEFAULT_CENSUS_OFFSETS)
    # offsets (0,-2), (-1,-1) and (-1,1) are bits 0, 1 and 3
    assert int(codes.data[2, 2]) == 0b001011


def test_census_clamps_at_the_border() -> None:
    img = np.full((3, 3), 50)
    img[0, 0] = 80
    codes = mini_census(gray(img), DEFAULT_CENSUS_OFFSETS)
    # (0,-2) and (-1,-1) clamp onto the pixel itself; the other four see 50
    assert int(codes.data[0, 0]) == 0b111100


def test_custom_offsets_are_honoured() -> None:
    img = np.zeros((3, 3))
    img[1, 1] = 9
    offsets = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1))
    assert int(mini_census(gray(img), offsets).data[1, 1]) == 63


@pytest.mark.parametrize(
    ("a", "b", "expected"),
    [(0b110011, 0b110011, 0), (0b101010, 0b010101, 6), (0b000111, 0b000101, 1)],
)
def test_hamming6(a: int, b: int, expected: int) -> None:
    assert hamming6(a, b) == expected


def test_hamming6_rejects_wide_codes() -> None:
    with pytest.raises(ValueError):
        hamming6(64, 0)


def test_cost_ad_examples() -> None:
    assert cost_ad(17, 17, 0.3) == 0.0
    # normalized difference 0.2 with lambda 0.2 gives 1 - e^-1
    assert cost_ad(51, 0, 0.2) == pytest.approx(0.63212, abs=1e-5)
    assert cost_ad(0, 255, 0.3) == pytest.approx(0.96432, abs=1e-5)
    assert cost_ad(200, 100, 0.3) == cost_ad(100, 200, 0.3)


def test_cost_mc_examples() -> None:
    assert cost_mc(0, 2.3) == 0.0
    assert cost_mc(6, 2.3) == pytest.approx(0.92637, abs=1e-5)
    assert cost_mc(2, 2.3) == pytest.approx(0.58087, abs=1e-5)


def test_identical_images_cost_nothing_at_zero_disparity(rng: np.random.Generator) -> None:
    img = random_gray(rng, 9, 7)
    census = mini_census(img, DEFAULT_CENSUS_OFFSETS)
    cost = cost_slice_left(img, img, census, census, 0, Params())
    assert not cost.data.any()


def test_columns_left_of_d_get_border_cost(rng: np.random.Generator) -> None:
    left, right = random_gray(rng, 9, 4), random_gray(rng, 9, 4)
    cl, cr = mini_census(left, DEFAULT_CENSUS_OFFSETS), mini_census(right, DEFAULT_CENSUS_OFFSETS)
    cost = cost_slice_left(left, right, cl, cr, 3, Params())
    assert (cost.data[:, :3] == BORDER_COST).all()
    assert (cost.data[:, 3:] < BORDER_COST).all()
    beyond = cost_slice_left(left, right, cl, cr, 12, Params())
    assert (beyond.data == BORDER_COST).all()


def test_cost_slice_equals_per_pixel_recomputation(rng: np.random.Generator) -> None:
    params = Params(lambda_ad=0.4, lambda_mc=1.7)
    left, right = random_gray(rng, 8, 8), random_gray(rng, 8, 8)
    cl, cr = mini_census(left, params.census_offsets), mini_census(right, params.census_offsets)
    d = 3
    with WorkerPool(3) as pool:
        cost = cost_slice_left(left, right, cl, cr, d, params, pool)
    for y in range(8):
        for x in range(d, 8):
            expected = cost_ad(left.data[y, x], right.data[y, x - d], params.lambda_ad) + cost_mc(
                hamming6(int(cl.data[y, x]), int(cr.data[y, x - d])), params.lambda_mc
            )
            assert cost.data[y, x] == expected


def test_costs_stay_within_zero_and_two(rng: np.random.Generator) -> None:
    left, right = random_gray(rng, 16, 10), random_gray(rng, 16, 10)
    cl, cr = mini_census(left, DEFAULT_CENSUS_OFFSETS), mini_census(right, DEFAULT_CENSUS_OFFSETS)
    for d in range(5):
        cost = cost_slice_left(left, right, cl, cr, d, Params())
        assert cost.data.min() >= 0.0
        assert cost.data.max() <= 2.0


def test_right_cost_at_zero_disparity_is_the_left_slice(rng: np.random.Generator) -> None:
    left, right = random_gray(rng, 10, 6), random_gray(rng, 10, 6)
    cl, cr = mini_census(left, DEFAULT_CENSUS_OFFSETS), mini_census(right, DEFAULT_CENSUS_OFFSETS)
    cost = cost_slice_left(left, right, cl, cr, 0, Params())
    np.testing.assert_array_equal(right_cost_from_left(cost, 0).data, cost.data)


def test_right_cost_is_the_shifted_left_slice(rng: np.random.Generator) -> None:
    left, right = random_gray(rng, 10, 6), random_gray(rng, 10, 6)
    cl, cr = mini_census(left, DEFAULT_CENSUS_OFFSETS), mini_census(right, DEFAULT_CENSUS_OFFSETS)
    d = 4
    left_cost = cost_slice_left(left, right, cl, cr, d, Params())
    right_cost = right_cost_from_left(left_cost, d)
    np.testing.assert_array_equal(right_cost.data[:, : 10 - d], left_cost.data[:, d:])
    assert (right_cost.data[:, 10 - d :] == BORDER_COST).all()
    assert right_cost.d == d
    assert math.isfinite(float(right_cost.data.sum()))


@pytest.mark.parametrize("lambda_ad", [0.1, 0.3, 1.0, 5.0])
def test_cost_ad_grows_with_the_difference_and_stays_below_one(lambda_ad: float) -> None:
    values = [cost_ad(0, diff, lambda_ad) for diff in range(256)]
    assert values[0] == 0.0
    assert all(a <= b for a, b in zip(values, values[1:]))
    assert all(0.0 <= v < 1.0 for v in values)


@pytest.mark.parametrize("lambda_mc", [0.5, 2.3, 10.0])
def test_cost_mc_grows_with_the_distance_and_stays_below_one(lambda_mc: float) -> None:
    values = [cost_mc(hd, lambda_mc) for hd in range(7)]
    assert values[0] == 0.0
    assert all(a < b for a, b in zip(values, values[1:]))
    assert all(0.0 <= v < 1.0 for v in values)
