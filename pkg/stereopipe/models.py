from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

FillStrategy = Literal["bilateral", "nearest", "smaller", "extrapolate"]

# Accepted spellings that resolve to a FillStrategy.
FILL_ALIASES = {"paper-eq11": "extrapolate"}

# (dx, dy) pairs; bit i of a census code belongs to entry i.
DEFAULT_CENSUS_OFFSETS: tuple[tuple[int, int], ...] = (
    (0, -2),
    (-1, -1),
    (1, -1),
    (-1, 1),
    (1, 1),
    (0, 2),
)


class Params(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda_ad: float = 0.3
    lambda_mc: float = 2.3
    t_fill: float = 3.0
    w_x: int = 21
    w_y: int = 31
    w_x_right: int | None = None
    w_y_right: int | None = None
    delta_arm: float = 20.0
    k_scale: int = 2
    m_pool: int = 1
    d_max_org: int = 64
    census_offsets: tuple[tuple[int, int], ...] = DEFAULT_CENSUS_OFFSETS
    downscale: bool = True
    fill: FillStrategy = "bilateral"
    cc_tolerance: float = 0.0

    @field_validator("fill", mode="before")
    @classmethod
    def _resolve_fill_alias(cls, value: object) -> object:
        return FILL_ALIASES.get(value, value) if isinstance(value, str) else value

    @property
    def right_w_x(self) -> int:
        return self.w_x if self.w_x_right is None else self.w_x_right

    @property
    def right_w_y(self) -> int:
        return self.w_y if self.w_y_right is None else self.w_y_right


class Calibration(BaseModel):
    d_max_org: int
    width: int
    height: int
    focal: float | None = None
    baseline: float | None = None
    doffs: float = 0.0


class EvalReport(BaseModel):
    bad_threshold: float
    bad_rate_all: float
    bad_rate_nonocc: float | None = None
    avg_abs_err: float
    coverage: float
    gt_valid_pixels: int


class BenchReport(BaseModel):
    width: int
    height: int
    d_max: int
    repetitions: int
    workers: int
    stage_ms: dict[str, float] = Field(default_factory=dict)
    overall_ms: float
    fps: float
    mde_per_s: float


class SweepReport(BaseModel):
    bad_threshold: float
    w_x_values: list[int]
    w_y_values: list[int]
    datasets: list[str] = Field(default_factory=list)
    # rows follow w_x_values, columns follow w_y_values
    bad_rates: list[list[float]] = Field(default_factory=list)
