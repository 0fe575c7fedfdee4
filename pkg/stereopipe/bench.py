from __future__ import annotations

import logging
import statistics

from .core import GrayImage
from .engine import PipelineEngine
from .errors import ParamsError
from .models import BenchReport, Params
from .parallel import resolve_workers

logger = logging.getLogger(__name__)

# Reporting order of the per-stage timings.
STAGE_ORDER = ("SD", "arms-x", "C+CA_x", "arms-y", "CA", "CC", "Post", "SU")


def mde_per_second(width: int, height: int, d_max: int, fps: float) -> float:
    """Mega disparity evaluations per second at the given (original) geometry."""
    return width * height * d_max * fps / 1e6


def bench_pipeline(
    left: GrayImage,
    right: GrayImage,
    params: Params,
    repetitions: int = 3,
    workers: int | None = None,
) -> BenchReport:
    if repetitions < 1:
        raise ParamsError("repetitions must be >= 1")
    engine = PipelineEngine(workers=workers)
    stage_runs: dict[str, list[float]] = {label: [] for label in STAGE_ORDER}
    overall_runs: list[float] = []
    for rep in range(repetitions):
        result = engine.run(left, right, params)
        for label in STAGE_ORDER:
            stage_runs[label].append(result.stage_ms.get(label, 0.0))
        overall_runs.append(result.overall_ms)
        logger.debug("bench repetition %d: %.1f ms", rep + 1, result.overall_ms)

    overall_ms = statistics.median(overall_runs)
    fps = 1000.0 / overall_ms
    return BenchReport(
        width=left.width,
        height=left.height,
        d_max=params.d_max_org,
        repetitions=repetitions,
        workers=resolve_workers(workers),
        stage_ms={label: statistics.median(runs) for label, runs in stage_runs.items()},
        overall_ms=overall_ms,
        fps=fps,
        mde_per_s=mde_per_second(left.width, left.height, params.d_max_org, fps),
    )


def format_bench_report(report: BenchReport) -> str:
    lines = [
        f"size      {report.width}x{report.height}",
        f"Dmax      {report.d_max}",
        f"workers   {report.workers}",
        f"reps      {report.repetitions}",
        "",
        f"{'stage':<10}{'ms':>12}",
    ]
    for label, value in report.stage_ms.items():
        lines.append(f"{label:<10}{value:>12.3f}")
    lines.append(f"{'Overall':<10}{report.overall_ms:>12.3f}")
    lines.append("")
    lines.append(f"FPS       {report.fps:.3f}")
    lines.append(f"MDE/s     {report.mde_per_s:.1f}")
    return "\n".join(lines)
