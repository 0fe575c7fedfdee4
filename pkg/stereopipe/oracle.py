"""Scalar reference pipeline for differential testing.

Everything here is nested Python loops over plain lists: no numpy kernels,
no cost reuse between bases and no streaming. The right-base cost is
computed from its own definition. Only ``Params`` and the policy constants
are shared with the optimized pipeline, and every floating-point expression
is written in the same operation order, so both must agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BORDER_COST, INVALID, DisparityMap, GrayImage, effective_scale, search_range, validate
from .errors import DimensionError
from .models import Params

Grid = list[list[int]]
RealGrid = list[list[float]]


def _rows(img: GrayImage) -> Grid:
    return [[int(value) for value in row] for row in img.data]


def _clamp(value: int, low: int, high: int) -> int:
    return low if value < low else high if value > high else value


def oracle_downscale(img: Grid, k: int, m: int) -> Grid:
    height, width = len(img), len(img[0])
    count = (2 * m + 1) ** 2
    out: Grid = []
    for y in range(height // k):
        row = []
        for x in range(width // k):
            total = 0
            for j in range(-m, m + 1):
                for i in range(-m, m + 1):
                    total += img[_clamp(k * y + j, 0, height - 1)][_clamp(k * x + i, 0, width - 1)]
            row.append((2 * total + count) // (2 * count))
        out.append(row)
    return out


def oracle_census(img: Grid, offsets: Sequence[tuple[int, int]]) -> Grid:
    height, width = len(img), len(img[0])
    out: Grid = []
    for y in range(height):
        row = []
        for x in range(width):
            code = 0
            for bit, (dx, dy) in enumerate(offsets):
                neighbor = img[_clamp(y + dy, 0, height - 1)][_clamp(x + dx, 0, width - 1)]
                if neighbor < img[y][x]:
                    code |= 1 << bit
            row.append(code)
        out.append(row)
    return out


def _pixel_cost(a: int, b: int, code_a: int, code_b: int, params: Params) -> float:
    ad = 1.0 - math.exp(-(abs(a - b) / 255.0) / params.lambda_ad)
    mc = 1.0 - math.exp(-bin(code_a ^ code_b).count("1") / params.lambda_mc)
    return ad + mc


def oracle_cost_left(
    left: Grid, right: Grid, census_l: Grid, census_r: Grid, d: int, params: Params
) -> RealGrid:
    out: RealGrid = []
    for y in range(len(left)):
        row = []
        for x in range(len(left[0])):
            if x - d < 0:
                row.append(BORDER_COST)
            else:
                row.append(
                    _pixel_cost(left[y][x], right[y][x - d], census_l[y][x], census_r[y][x - d], params)
                )
        out.append(row)
    return out


def oracle_cost_right(
    left: Grid, right: Grid, census_l: Grid, census_r: Grid, d: int, params: Params
) -> RealGrid:
    width = len(left[0])
    out: RealGrid = []
    for y in range(len(left)):
        row = []
        for x in range(width):
            if x + d >= width:
                row.append(BORDER_COST)
            else:
                # |R - L| equals |L - R| and Hamming distance is symmetric;
                # argument order mirrors the left-base expression.
                row.append(
                    _pixel_cost(left[y][x + d], right[y][x], census_l[y][x + d], census_r[y][x], params)
                )
        out.append(row)
    return out


def oracle_arms(img: Grid, delta: float, cap: int, vertical: bool = False) -> tuple[Grid, Grid]:
    height, width = len(img), len(img[0])
    minus: Grid = [[0] * width for _ in range(height)]
    plus: Grid = [[0] * width for _ in range(height)]
    for y in range(height):
        for x in range(width):
            center = img[y][x]
            if vertical:
                low_room, high_room = y, height - 1 - y
            else:
                low_room, high_room = x, width - 1 - x

            def at(step: int) -> int:
                return img[y + step][x] if vertical else img[y][x + step]

            n = 0
            while n < min(cap, high_room) and abs(at(n + 1) - center) < delta:
                n += 1
            plus[y][x] = n
            n = 0
            while n < min(cap, low_room) and abs(at(-(n + 1)) - center) < delta:
                n += 1
            minus[y][x] = n
    return minus, plus


def oracle_aggregate(cost: RealGrid, minus: Grid, plus: Grid, vertical: bool = False) -> RealGrid:
    height, width = len(cost), len(cost[0])
    out: RealGrid = []
    for y in range(height):
        row = []
        for x in range(width):
            total = cost[y][x]
            for step in range(1, plus[y][x] + 1):
                total += cost[y + step][x] if vertical else cost[y][x + step]
            for step in range(1, minus[y][x] + 1):
                total += cost[y - step][x] if vertical else cost[y][x - step]
            row.append(total)
        out.append(row)
    return out


def oracle_wta(volume: list[RealGrid]) -> RealGrid:
    height, width = len(volume[0]), len(volume[0][0])
    out: RealGrid = []
    for y in range(height):
        row = []
        for x in range(width):
            best, chosen = math.inf, 0
            for d, cost in enumerate(volume):
                if cost[y][x] < best:
                    best, chosen = cost[y][x], d
            row.append(float(chosen))
        out.append(row)
    return out


def oracle_cross_check(dl: RealGrid, dr: RealGrid, tolerance: float = 0.0) -> list[list[bool]]:
    out = []
    for y in range(len(dl)):
        row = []
        for x in range(len(dl[0])):
            value = dl[y][x]
            if not math.isfinite(value):
                row.append(False)
                continue
            k = int(value)
            row.append(x - k >= 0 and abs(dr[y][x - k] - k) <= tolerance)
        out.append(row)
    return out


def oracle_median(d: RealGrid) -> RealGrid:
    height, width = len(d), len(d[0])
    out: RealGrid = []
    for y in range(height):
        row = []
        for x in range(width):
            if not math.isfinite(d[y][x]):
                row.append(INVALID)
                continue
            values = sorted(
                d[_clamp(y + j, 0, height - 1)][_clamp(x + i, 0, width - 1)]
                for j in (-1, 0, 1)
                for i in (-1, 0, 1)
                if math.isfinite(d[_clamp(y + j, 0, height - 1)][_clamp(x + i, 0, width - 1)])
            )
            row.append(values[(len(values) - 1) // 2])
        out.append(row)
    return out


def _fill_value(
    strategy: str,
    a: float,
    b: float,
    i: int,
    j: int,
    base_row: list[int] | None,
    x: int,
    t_fill: float,
    clip_max: float | None,
) -> float:
    if strategy == "nearest":
        return a if i <= j else b
    if strategy == "smaller":
        return min(a, b)
    if abs(a - b) <= t_fill:
        if strategy == "extrapolate":
            stepped = a + i * ((a - b) / (i + j))
            upper = math.inf if clip_max is None else clip_max
            return min(max(stepped, 0.0), upper)
        return a + i * ((b - a) / (i + j))
    assert base_row is not None
    if abs(base_row[x - i] - base_row[x]) <= abs(base_row[x + j] - base_row[x]):
        return a
    return b


def oracle_fill(
    d: RealGrid,
    base: Grid | None,
    strategy: str,
    t_fill: float = 0.0,
    clip_max: float | None = None,
) -> RealGrid:
    out = [list(row) for row in d]
    width = len(d[0])
    for y, row in enumerate(d):
        for x in range(width):
            if math.isfinite(row[x]):
                continue
            i = next((step for step in range(1, x + 1) if math.isfinite(row[x - step])), None)
            j = next((step for step in range(1, width - x) if math.isfinite(row[x + step])), None)
            if i is not None and j is not None:
                out[y][x] = _fill_value(
                    strategy,
                    row[x - i],
                    row[x + j],
                    i,
                    j,
                    None if base is None else base[y],
                    x,
                    t_fill,
                    clip_max,
                )
            elif i is not None:
                out[y][x] = row[x - i]
            elif j is not None:
                out[y][x] = row[x + j]

    flat = [value for row in out for value in row]
    valid = [index for index, value in enumerate(flat) if math.isfinite(value)]
    if valid and len(valid) < len(flat):
        last = flat[valid[0]]
        for index, value in enumerate(flat):
            if math.isfinite(value):
                last = value
            else:
                flat[index] = last
        out = [flat[row * width : (row + 1) * width] for row in range(len(out))]
    return out


def oracle_scale_up(d: RealGrid, base_org: Grid, k: int, t_fill: float) -> RealGrid:
    if k == 1:
        return [list(row) for row in d]
    height, width = len(base_org), len(base_org[0])
    small_h, small_w = len(d), len(d[0])
    seeded: RealGrid = []
    for s in range(small_h):
        row = [INVALID] * width
        for x in range(small_w):
            row[k * x] = d[s][x] * k
        seeded.append(row)
    base_rows = [base_org[k * s] for s in range(small_h)]
    rows = oracle_fill(seeded, base_rows, "bilateral", k * t_fill)

    out: RealGrid = []
    for y in range(height):
        s = min(y // k, small_h - 1)
        offset = y - s * k
        if offset == 0 or s + 1 >= small_h:
            out.append(list(rows[s]))
            continue
        i, j = offset, k - offset
        row = []
        for x in range(width):
            a, b = rows[s][x], rows[s + 1][x]
            if math.isfinite(a) and math.isfinite(b):
                row.append(a + i * ((b - a) / (i + j)))
            elif math.isfinite(a):
                row.append(a)
            else:
                row.append(b)
        out.append(row)
    return out


@dataclass(slots=True)
class OracleTrace:
    left: np.ndarray
    right: np.ndarray
    arms_x_left: tuple[np.ndarray, np.ndarray]
    arms_x_right: tuple[np.ndarray, np.ndarray]
    arms_y_left: tuple[np.ndarray, np.ndarray]
    arms_y_right: tuple[np.ndarray, np.ndarray]
    dl: np.ndarray
    dr: np.ndarray
    mask: np.ndarray
    masked: np.ndarray
    median: np.ndarray
    refined: np.ndarray
    disparity: DisparityMap


def _pair(arms: tuple[Grid, Grid]) -> tuple[np.ndarray, np.ndarray]:
    return np.array(arms[0]), np.array(arms[1])


def oracle_pipeline(left_img: GrayImage, right_img: GrayImage, params: Params) -> OracleTrace:
    validate(params)
    if left_img.shape != right_img.shape:
        raise DimensionError("left and right images must have the same size")
    k = effective_scale(params)
    left_org = _rows(left_img)
    if params.downscale:
        left = oracle_downscale(left_org, params.k_scale, params.m_pool)
        right = oracle_downscale(_rows(right_img), params.k_scale, params.m_pool)
    else:
        left, right = left_org, _rows(right_img)

    census_l = oracle_census(left, params.census_offsets)
    census_r = oracle_census(right, params.census_offsets)
    arms_x_l = oracle_arms(left, params.delta_arm, params.w_x)
    arms_x_r = oracle_arms(right, params.delta_arm, params.right_w_x)
    arms_y_l = oracle_arms(left, params.delta_arm, params.w_y, vertical=True)
    arms_y_r = oracle_arms(right, params.delta_arm, params.right_w_y, vertical=True)

    volume_l: list[RealGrid] = []
    volume_r: list[RealGrid] = []
    d_range = search_range(params)
    for d in range(d_range):
        cost_l = oracle_cost_left(left, right, census_l, census_r, d, params)
        cost_r = oracle_cost_right(left, right, census_l, census_r, d, params)
        x_l = oracle_aggregate(cost_l, *arms_x_l)
        x_r = oracle_aggregate(cost_r, *arms_x_r)
        volume_l.append(oracle_aggregate(x_l, *arms_y_l, vertical=True))
        volume_r.append(oracle_aggregate(x_r, *arms_y_r, vertical=True))
    dl = oracle_wta(volume_l)
    dr = oracle_wta(volume_r)

    mask = oracle_cross_check(dl, dr, params.cc_tolerance)
    masked = [
        [dl[y][x] if mask[y][x] else INVALID for x in range(len(dl[0]))] for y in range(len(dl))
    ]
    median = oracle_median(masked)
    refined = oracle_fill(
        median,
        left if params.fill in ("bilateral", "extrapolate") else None,
        params.fill,
        params.t_fill,
        clip_max=float(d_range - 1),
    )
    final = oracle_scale_up(refined, left_org, k, params.t_fill)

    return OracleTrace(
        left=np.array(left),
        right=np.array(right),
        arms_x_left=_pair(arms_x_l),
        arms_x_right=_pair(arms_x_r),
        arms_y_left=_pair(arms_y_l),
        arms_y_right=_pair(arms_y_r),
        dl=np.array(dl),
        dr=np.array(dr),
        mask=np.array(mask, dtype=bool),
        masked=np.array(masked),
        median=np.array(median),
        refined=np.array(refined),
        disparity=DisparityMap(np.array(final)),
    )
