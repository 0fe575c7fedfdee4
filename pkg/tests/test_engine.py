from __future__ import annotations

import numpy as np
import pytest

from stereopipe.bench import STAGE_ORDER
from stereopipe.core import GrayImage
from stereopipe.engine import PipelineEngine, run_pipeline
from stereopipe.errors import DimensionError, ParamsError
from stereopipe.models import Params
from stereopipe.stages import register_builtin_stages
from stereopipe.stages.base import StageRegistry, StageSpec
from stereopipe.synthetic import synthetic_shifted_pair

from conftest import random_gray, random_params


@pytest.mark.parametrize("seed", range(10))
def test_output_is_identical_for_any_worker_count(seed: int) -> None:
    rng = np.random.default_rng(500 + seed)
    width, height = int(rng.integers(20, 70)), int(rng.integers(12, 50))
    left, right = random_gray(rng, width, height), random_gray(rng, width, height)
    params = random_params(rng, d_max_org=int(rng.integers(4, 24)))
    outputs = [run_pipeline(left, right, params, workers=n).disparity.data for n in (1, 2, 8)]
    np.testing.assert_array_equal(outputs[0], outputs[1])
    np.testing.assert_array_equal(outputs[0], outputs[2])


def _interior(shape: tuple[int, int], left_margin: int, margin: int) -> tuple[slice, slice]:
    height, width = shape
    return slice(margin, height - margin), slice(left_margin, width - margin)


@pytest.mark.parametrize("shift", [2, 4, 6])
def test_constant_shift_is_recovered_at_full_resolution(shift: int) -> None:
    params = Params(d_max_org=16, w_x=9, w_y=15, downscale=False)
    # 3x3 tiles: single-pixel texture lets d=0 and d=shift tie at zero cost
    left, right = synthetic_shifted_pair(128, 64, shift, seed=shift, block=3)
    result = run_pipeline(left, right, params, workers=4)
    rows, cols = _interior(left.shape, shift + params.w_x + 1, 2)
    assert (result.disparity.data[rows, cols] == shift).mean() >= 0.95

    # every GCP in the interior carries the true disparity
    gcp = result.outputs["mask"].data[rows, cols]
    dl = result.outputs["dl"].data[rows, cols]
    assert (dl[gcp] == shift).all()
    assert gcp.mean() >= 0.80


@pytest.mark.parametrize("shift", [2, 4, 6])
def test_constant_shift_survives_the_scale_round_trip(shift: int) -> None:
    params = Params(d_max_org=16, w_x=9, w_y=15)
    left, right = synthetic_shifted_pair(160, 96, shift, seed=10 + shift)
    result = run_pipeline(left, right, params, workers=2)
    k = params.k_scale
    rows, cols = _interior(left.shape, k * (shift + params.w_x) + 2, 2 * k)
    assert (np.abs(result.disparity.data[rows, cols] - shift) <= 1.0).mean() >= 0.90
    assert result.disparity.shape == left.shape

    small_rows, small_cols = _interior(
        result.outputs["dl"].shape, shift // k + params.w_x + 1, 2
    )
    gcp = result.outputs["mask"].data[small_rows, small_cols]
    dl = result.outputs["dl"].data[small_rows, small_cols]
    assert (dl[gcp] == shift // k).all()
    assert gcp.mean() >= 0.80


def test_stage_timings_cover_the_bench_taxonomy(rng: np.random.Generator) -> None:
    left, right = random_gray(rng, 24, 16), random_gray(rng, 24, 16)
    result = PipelineEngine().run(left, right, Params(d_max_org=8))
    assert set(result.stage_ms) == set(STAGE_ORDER)
    assert result.overall_ms > 0.0
    assert result.overall_ms >= max(result.stage_ms.values())


def test_invalid_parameters_are_rejected_before_running(rng: np.random.Generator) -> None:
    img = random_gray(rng, 8, 8)
    with pytest.raises(ParamsError, match="lambda_ad"):
        run_pipeline(img, img, Params(lambda_ad=0.0))


def test_mismatched_views_are_rejected(rng: np.random.Generator) -> None:
    with pytest.raises(DimensionError):
        run_pipeline(random_gray(rng, 8, 8), random_gray(rng, 9, 8), Params())


def test_disparity_range_wider_than_the_image(rng: np.random.Generator) -> None:
    left, right = random_gray(rng, 10, 8), random_gray(rng, 10, 8)
    result = run_pipeline(left, right, Params(d_max_org=64))
    assert result.disparity.shape == (8, 10)
    assert not np.isnan(result.disparity.data).any()


def test_flat_image_produces_a_finite_map() -> None:
    flat = GrayImage(np.full((12, 16), 128))
    result = run_pipeline(flat, flat, Params(d_max_org=8))
    assert (result.disparity.data == 0.0).all()


def test_registry_lists_builtin_stages_in_dependency_order() -> None:
    registry = StageRegistry()
    register_builtin_stages(registry)
    assert registry.list_names() == [
        "scale_down",
        "arms_x",
        "arms_y",
        "cost_aggregate",
        "cross_check",
        "refine",
        "scale_up",
    ]
    with pytest.raises(KeyError, match="Unknown stage"):
        registry.get("census")


def _noop(_ctx, payload):  # type: ignore[no-untyped-def]
    return payload


def test_cycles_are_reported() -> None:
    registry = StageRegistry()
    registry.register(StageSpec("a", "", _noop, requires=("b",)))
    registry.register(StageSpec("b", "", _noop, requires=("a",)))
    with pytest.raises(ValueError, match="cycle"):
        PipelineEngine(registry)._topological_sort(
            [registry.get(name) for name in registry.list_names()]
        )


def test_unknown_requirements_are_reported() -> None:
    registry = StageRegistry()
    registry.register(StageSpec("a", "", _noop, requires=("missing",)))
    with pytest.raises(ValueError, match="unknown stage: missing"):
        PipelineEngine(registry)._topological_sort([registry.get("a")])
