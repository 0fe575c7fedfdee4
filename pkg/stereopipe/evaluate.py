from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import DisparityMap, GrayImage, require_same_shape
from .engine import PipelineEngine
from .models import EvalReport, Params, SweepReport

logger = logging.getLogger(__name__)

# Middlebury occlusion masks mark non-occluded pixels with 255.
NONOCC_VALUE = 255


def _bad_rate(bad: np.ndarray, region: np.ndarray) -> float:
    total = int(region.sum())
    if total == 0:
        return 0.0
    return 100.0 * int((bad & region).sum()) / total


def eval_bad(
    pred: DisparityMap,
    gt: DisparityMap,
    threshold: float = 2.0,
    occ_mask: np.ndarray | None = None,
) -> EvalReport:
    require_same_shape(pred.data, gt.data, "prediction vs ground truth")
    gt_valid = gt.valid_mask()
    pred_valid = pred.valid_mask()
    both = gt_valid & pred_valid
    error = np.zeros(pred.shape)
    error[both] = np.abs(pred.data[both] - gt.data[both])
    # A missing prediction counts as bad.
    bad = gt_valid & (~pred_valid | (error > threshold))

    nonocc_rate = None
    if occ_mask is not None:
        require_same_shape(pred.data, occ_mask, "prediction vs occlusion mask")
        nonocc_rate = _bad_rate(bad, gt_valid & (occ_mask == NONOCC_VALUE))

    compared = int(both.sum())
    return EvalReport(
        bad_threshold=threshold,
        bad_rate_all=_bad_rate(bad, gt_valid),
        bad_rate_nonocc=nonocc_rate,
        avg_abs_err=float(error[both].sum() / compared) if compared else 0.0,
        coverage=float(pred_valid.mean()),
        gt_valid_pixels=int(gt_valid.sum()),
    )


def format_eval_report(report: EvalReport) -> str:
    rows = [
        (f"bad-{report.bad_threshold:g} (all)", f"{report.bad_rate_all:.2f}%"),
        (
            f"bad-{report.bad_threshold:g} (nonocc)",
            "-" if report.bad_rate_nonocc is None else f"{report.bad_rate_nonocc:.2f}%",
        ),
        ("avg abs err", f"{report.avg_abs_err:.3f} px"),
        ("coverage", f"{report.coverage:.4f}"),
        ("gt valid pixels", str(report.gt_valid_pixels)),
    ]
    key_width = max(len(key) for key, _ in rows)
    return "\n".join(f"{key.ljust(key_width)}  {value}" for key, value in rows)


@dataclass(slots=True)
class SweepCase:
    name: str
    left: GrayImage
    right: GrayImage
    gt: DisparityMap
    occ_mask: np.ndarray | None = None


def run_sweep(
    cases: list[SweepCase],
    params: Params,
    w_x_values: list[int],
    w_y_values: list[int],
    threshold: float = 2.0,
    workers: int | None = 1,
) -> SweepReport:
    """Mean bad rate over ``cases`` for every (W_x, W_y) cell; right caps follow the left."""
    engine = PipelineEngine(workers=workers)
    grid: list[list[float]] = []
    for w_x in w_x_values:
        row: list[float] = []
        for w_y in w_y_values:
            cell = params.model_copy(
                update={"w_x": w_x, "w_y": w_y, "w_x_right": None, "w_y_right": None}
            )
            rates = []
            for case in cases:
                result = engine.run(case.left, case.right, cell)
                report = eval_bad(result.disparity, case.gt, threshold, case.occ_mask)
                rates.append(report.bad_rate_all)
            row.append(float(np.mean(rates)))
            logger.info("sweep W_x=%d W_y=%d bad=%.2f%%", w_x, w_y, row[-1])
        grid.append(row)
    return SweepReport(
        bad_threshold=threshold,
        w_x_values=list(w_x_values),
        w_y_values=list(w_y_values),
        datasets=[case.name for case in cases],
        bad_rates=grid,
    )


def format_sweep_csv(report: SweepReport) -> str:
    header = "W_x\\W_y," + ",".join(f"W_y={w_y}" for w_y in report.w_y_values)
    lines = [header]
    for w_x, row in zip(report.w_x_values, report.bad_rates):
        lines.append(f"W_x={w_x}," + ",".join(f"{rate:.2f}" for rate in row))
    return "\n".join(lines) + "\n"


def format_sweep_table(report: SweepReport) -> str:
    cells = [["W_x\\W_y"] + [f"W_y={w_y}" for w_y in report.w_y_values]]
    for w_x, row in zip(report.w_x_values, report.bad_rates):
        cells.append([f"W_x={w_x}"] + [f"{rate:.2f}" for rate in row])
    widths = [max(len(line[col]) for line in cells) for col in range(len(cells[0]))]
    return "\n".join(
        "  ".join(cell.rjust(widths[col]) for col, cell in enumerate(line)) for line in cells
    )
