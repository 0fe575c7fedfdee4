from __future__ import annotations

from typing import Any

from ..aggregate import aggregate_x, aggregate_y, arms_horizontal, arms_vertical
from ..core import GrayImage
from ..cost import cost_slice_left, mini_census, right_cost_from_left
from ..match import WinnerTakeAll, apply_gcp_mask, cross_check
from ..preprocess import mean_pool_downscale
from ..refine import fill_non_gcp, median3x3
from ..rescale import scale_up
from .base import StageContext, StageRegistry, StageSpec


def scale_down_handler(ctx: StageContext, payload: dict[str, Any]) -> dict[str, Any]:
    left_org: GrayImage = payload["left_org"]
    right_org: GrayImage = payload["right_org"]
    if not ctx.params.downscale:
        return {"left": left_org, "right": right_org, "left_org": left_org}
    k, m = ctx.params.k_scale, ctx.params.m_pool
    return {
        "left": mean_pool_downscale(left_org, k, m, ctx.pool),
        "right": mean_pool_downscale(right_org, k, m, ctx.pool),
        "left_org": left_org,
    }


def arms_x_handler(ctx: StageContext, payload: dict[str, Any]) -> dict[str, Any]:
    params = ctx.params
    return {
        "arms_x_left": arms_horizontal(payload["left"], params.delta_arm, params.w_x, ctx.pool),
        "arms_x_right": arms_horizontal(
            payload["right"], params.delta_arm, params.right_w_x, ctx.pool
        ),
    }


def arms_y_handler(ctx: StageContext, payload: dict[str, Any]) -> dict[str, Any]:
    params = ctx.params
    return {
        "arms_y_left": arms_vertical(payload["left"], params.delta_arm, params.w_y, ctx.pool),
        "arms_y_right": arms_vertical(
            payload["right"], params.delta_arm, params.right_w_y, ctx.pool
        ),
    }


def cost_aggregate_handler(ctx: StageContext, payload: dict[str, Any]) -> dict[str, Any]:
    params, pool, clock = ctx.params, ctx.pool, ctx.clock
    left: GrayImage = payload["left"]
    right: GrayImage = payload["right"]
    with clock.section("C+CA_x"):
        census_l = mini_census(left, params.census_offsets)
        census_r = mini_census(right, params.census_offsets)
    left_wta, right_wta = WinnerTakeAll(), WinnerTakeAll()

    # One disparity at a time: memory stays at a handful of slices.
    for d in range(ctx.search_range):
        with clock.section("C+CA_x"):
            cost_l = cost_slice_left(left, right, census_l, census_r, d, params, pool)
            cost_r = right_cost_from_left(cost_l, d)
            x_l = aggregate_x(cost_l, payload["arms_x_left"], pool)
            x_r = aggregate_x(cost_r, payload["arms_x_right"], pool)
        with clock.section("CA"):
            left_wta.update(aggregate_y(x_l, payload["arms_y_left"], pool))
            right_wta.update(aggregate_y(x_r, payload["arms_y_right"], pool))
    return {"dl": left_wta.result(), "dr": right_wta.result()}


def cross_check_handler(ctx: StageContext, payload: dict[str, Any]) -> dict[str, Any]:
    mask = cross_check(payload["dl"], payload["dr"], ctx.params.cc_tolerance)
    return {"mask": mask, "masked": apply_gcp_mask(payload["dl"], mask)}


def refine_handler(ctx: StageContext, payload: dict[str, Any]) -> dict[str, Any]:
    params = ctx.params
    median = median3x3(payload["masked"])
    refined = fill_non_gcp(
        median,
        payload["left"],
        params.fill,
        params.t_fill,
        clip_max=float(ctx.search_range - 1),
        pool=ctx.pool,
    )
    return {"median": median, "refined": refined}


def scale_up_handler(ctx: StageContext, payload: dict[str, Any]) -> dict[str, Any]:
    return {"disparity": scale_up(payload["refined"], payload["left_org"], ctx.params, ctx.pool)}


def register_builtin_stages(registry: StageRegistry) -> None:
    registry.register(
        StageSpec(
            name="scale_down",
            description="Mean-pools both gray views by K.",
            handler=scale_down_handler,
            label="SD",
        )
    )
    registry.register(
        StageSpec(
            name="arms_x",
            description="Similar-brightness runs along x for both views.",
            handler=arms_x_handler,
            requires=("scale_down",),
            label="arms-x",
        )
    )
    registry.register(
        StageSpec(
            name="arms_y",
            description="Similar-brightness runs along y for both views.",
            handler=arms_y_handler,
            requires=("scale_down",),
            label="arms-y",
        )
    )
    registry.register(
        StageSpec(
            name="cost_aggregate",
            description="Streams cost, x/y aggregation and WTA over d for both bases.",
            handler=cost_aggregate_handler,
            requires=("scale_down", "arms_x", "arms_y"),
        )
    )
    registry.register(
        StageSpec(
            name="cross_check",
            description="Marks left/right consistent pixels as GCPs.",
            handler=cross_check_handler,
            requires=("cost_aggregate",),
            label="CC",
        )
    )
    registry.register(
        StageSpec(
            name="refine",
            description="Median filter, then fills non-GCPs.",
            handler=refine_handler,
            requires=("scale_down", "cross_check"),
            label="Post",
        )
    )
    registry.register(
        StageSpec(
            name="scale_up",
            description="Scales the refined map back to input resolution.",
            handler=scale_up_handler,
            requires=("scale_down", "refine"),
            label="SU",
        )
    )
