from __future__ import annotations

import math

import numpy as np
import pytest

from stereopipe.bench import STAGE_ORDER, bench_pipeline, format_bench_report, mde_per_second
from stereopipe.models import Params

from conftest import random_gray


def test_mde_formula() -> None:
    assert mde_per_second(1436, 992, 145, 40.0) == pytest.approx(8262.2, abs=0.1)
    assert round(mde_per_second(1436, 992, 145, 40.0)) == 8262
    assert math.isfinite(mde_per_second(10, 10, 1, 1e6))


def test_bench_reports_every_stage(rng: np.random.Generator) -> None:
    left, right = random_gray(rng, 32, 20), random_gray(rng, 32, 20)
    report = bench_pipeline(left, right, Params(d_max_org=8), repetitions=2, workers=2)
    assert list(report.stage_ms) == list(STAGE_ORDER)
    assert (report.width, report.height, report.d_max) == (32, 20, 8)
    assert report.workers == 2
    assert report.fps == pytest.approx(1000.0 / report.overall_ms)
    assert report.mde_per_s == pytest.approx(32 * 20 * 8 * report.fps / 1e6)

    text = format_bench_report(report)
    for label in (*STAGE_ORDER, "Overall", "MDE/s"):
        assert label in text


def test_bench_needs_a_repetition(rng: np.random.Generator) -> None:
    img = random_gray(rng, 8, 8)
    with pytest.raises(ValueError):
        bench_pipeline(img, img, Params(), repetitions=0)
