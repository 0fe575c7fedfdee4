from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Sequence, get_args

from pydantic import BaseModel

from .bench import bench_pipeline, format_bench_report
from .config import FLAG_FIELDS, app_config, load_params_file, params_from_mapping
from .core import GrayImage
from .engine import PipelineEngine
from .errors import ParamsError, StereoError
from .evaluate import SweepCase, eval_bad, format_eval_report, format_sweep_csv, format_sweep_table, run_sweep
from .io import (
    find_middlebury_pair,
    read_image,
    read_mask,
    read_middlebury_calib,
    read_pfm,
    render_disparity,
    write_pfm,
    write_png,
)
from .models import FILL_ALIASES, Calibration, FillStrategy, Params
from .oracle import oracle_pipeline
from .rescale import depth_map
from .stages import register_builtin_stages
from .stages.base import StageRegistry
from .synthetic import synthetic_shifted_pair

logger = logging.getLogger("stereopipe")

LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s - %(message)s"

_PARAM_FLAGS = {
    **FLAG_FIELDS,
    "lambda_ad": "lambda_ad",
    "lambda_mc": "lambda_mc",
    "fill": "fill",
    "cc_tolerance": "cc_tolerance",
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("matching parameters")
    group.add_argument("--config", type=Path, help="key=value parameter file")
    group.add_argument("--preset", choices=app_config.preset_names() or None)
    source = group.add_mutually_exclusive_group()
    source.add_argument("--max-disp", type=int, help="maximum disparity at input resolution")
    source.add_argument("--calib", type=Path, help="Middlebury calib.txt (ndisp, cam0, baseline)")
    group.add_argument("--scale", type=int, help="scale-down factor K")
    group.add_argument("--pool-radius", type=int, help="mean-pool radius m")
    group.add_argument("--wx", type=int)
    group.add_argument("--wy", type=int)
    group.add_argument("--wx-right", type=int)
    group.add_argument("--wy-right", type=int)
    group.add_argument("--delta", type=float, help="brightness similarity threshold (0-255)")
    group.add_argument("--tfill", type=float, help="disparity continuity threshold T")
    group.add_argument("--lambda-ad", type=float)
    group.add_argument("--lambda-mc", type=float)
    group.add_argument("--census", help="six dx:dy offsets, comma separated")
    group.add_argument("--fill", choices=[*get_args(FillStrategy), *FILL_ALIASES])
    group.add_argument("--cc-tolerance", type=float)
    group.add_argument("--no-downscale", action="store_true")
    group.add_argument("--threads", type=int, help="worker threads (default: config / env)")


def _add_pair_flags(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument("--left", type=Path, required=required)
    parser.add_argument("--right", type=Path, required=required)
    if not required:
        parser.add_argument("--dataset", type=Path, help="Middlebury scene directory")


def resolve_params(args: argparse.Namespace, calibration: Calibration | None = None) -> Params:
    params = app_config.default_params()
    if getattr(args, "preset", None):
        params = params_from_mapping(params, app_config.preset(args.preset))
    if getattr(args, "config", None):
        params = load_params_file(args.config, params)
    overrides: dict[str, Any] = {}
    if calibration is not None:
        overrides["d_max_org"] = calibration.d_max_org
    for flag, field in _PARAM_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "no_downscale", False):
        overrides["downscale"] = False
    return params_from_mapping(params, overrides)


def _workers(args: argparse.Namespace) -> int:
    if getattr(args, "threads", None) is not None:
        return args.threads
    return int(app_config.runtime_settings()["threads"])


def _load_pair(args: argparse.Namespace) -> tuple[GrayImage, GrayImage, Calibration | None]:
    calib_path = getattr(args, "calib", None)
    if getattr(args, "dataset", None):
        pair = find_middlebury_pair(args.dataset)
        left, right = read_image(pair.left), read_image(pair.right)
        if calib_path is None and getattr(args, "max_disp", None) is None:
            calib_path = pair.calib
    elif args.left and args.right:
        left, right = read_image(args.left), read_image(args.right)
    else:
        raise ParamsError("give --left and --right, or --dataset")
    calibration = read_middlebury_calib(calib_path) if calib_path else None
    return left, right, calibration


def _emit_json(model: BaseModel, target: str | None) -> None:
    if not target:
        return
    payload = model.model_dump_json(indent=2)
    if target == "-":
        print(payload)
    else:
        Path(target).write_text(payload + "\n", encoding="utf-8")


def cmd_run(args: argparse.Namespace) -> int:
    left, right, calibration = _load_pair(args)
    params = resolve_params(args, calibration)
    result = PipelineEngine(workers=_workers(args)).run(left, right, params)
    write_pfm(result.disparity, args.out)
    if args.vis:
        write_png(render_disparity(result.disparity, params.d_max_org), args.vis)
    if args.depth_out:
        if calibration is None or calibration.focal is None or calibration.baseline is None:
            raise ParamsError("--depth-out needs a calibration with cam0 and baseline")
        # Middlebury baselines are in millimetres.
        depth = depth_map(
            result.disparity, calibration.focal, calibration.baseline / 1000.0, calibration.doffs
        )
        write_pfm(depth, args.depth_out)
    gcp = result.outputs["mask"].fraction()
    logger.info(
        "wrote %s (%dx%d, Dmax=%d, GCP %.1f%%, %.1f ms)",
        args.out,
        result.disparity.width,
        result.disparity.height,
        params.d_max_org,
        100.0 * gcp,
        result.overall_ms,
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    pred = read_pfm(args.pred)
    gt = read_pfm(args.gt)
    occ = read_mask(args.occ) if args.occ else None
    threshold = args.bad if args.bad is not None else float(app_config.eval_settings()["bad_threshold"])
    report = eval_bad(pred, gt, threshold, occ)
    logger.info("evaluated %s against %s at bad-%g", args.pred, args.gt, threshold)
    print(format_eval_report(report))
    _emit_json(report, args.json)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.synthetic:
        geometry = app_config.benchmark_geometry(args.synthetic)
        left, right = synthetic_shifted_pair(geometry["width"], geometry["height"], shift=8, seed=0)
        params = resolve_params(args)
        if args.max_disp is None:
            params = params.model_copy(update={"d_max_org": geometry["ndisp"]})
    else:
        left, right, calibration = _load_pair(args)
        params = resolve_params(args, calibration)
    reps = args.reps if args.reps is not None else int(app_config.bench_settings()["repetitions"])
    report = bench_pipeline(left, right, params, reps, _workers(args))
    logger.info("bench %dx%d Dmax=%d over %d repetition(s)", left.width, left.height, params.d_max_org, reps)
    print(format_bench_report(report))
    _emit_json(report, args.json)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cases: list[SweepCase] = []
    calibration: Calibration | None = None
    for directory in args.dataset or []:
        pair = find_middlebury_pair(directory)
        if pair.gt is None:
            raise ParamsError(f"{directory}: no disp0GT.pfm for the sweep")
        if pair.calib is not None and calibration is None:
            calibration = read_middlebury_calib(pair.calib)
        cases.append(
            SweepCase(
                name=pair.name,
                left=read_image(pair.left),
                right=read_image(pair.right),
                gt=read_pfm(pair.gt),
                occ_mask=read_mask(pair.occ_mask) if pair.occ_mask else None,
            )
        )
    if args.left and args.right:
        if not args.gt:
            raise ParamsError("--gt is required with --left/--right")
        cases.append(
            SweepCase(
                name=args.left.stem,
                left=read_image(args.left),
                right=read_image(args.right),
                gt=read_pfm(args.gt),
                occ_mask=read_mask(args.occ) if args.occ else None,
            )
        )
    if not cases:
        raise ParamsError("give at least one --dataset or --left/--right/--gt")
    if args.calib:
        calibration = read_middlebury_calib(args.calib)
    params = resolve_params(args, calibration)
    default_wx, default_wy = app_config.sweep_grid()
    threshold = args.bad if args.bad is not None else float(app_config.eval_settings()["bad_threshold"])
    report = run_sweep(
        cases,
        params,
        args.wx_list or default_wx,
        args.wy_list or default_wy,
        threshold,
        _workers(args),
    )
    print(format_sweep_table(report))
    if args.csv:
        Path(args.csv).write_text(format_sweep_csv(report), encoding="utf-8")
    _emit_json(report, args.json)
    return 0


def cmd_stages(_args: argparse.Namespace) -> int:
    registry = StageRegistry()
    register_builtin_stages(registry)
    specs = registry.list_specs()
    name_width = max(len(spec["name"]) for spec in specs)
    for spec in specs:
        print(
            f"{spec['name'].ljust(name_width)}  {spec['label']:<7} "
            f"{spec['description']} (after: {spec['requires']})"
        )
    return 0


def cmd_oracle_run(args: argparse.Namespace) -> int:
    left, right = read_image(args.left), read_image(args.right)
    calibration = read_middlebury_calib(args.calib) if args.calib else None
    params = resolve_params(args, calibration)
    trace = oracle_pipeline(left, right, params)
    write_pfm(trace.disparity, args.out)
    logger.info("oracle wrote %s", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereopipe",
        description="Scale-down / cross-aggregation / cross-check stereo matcher.",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    subparsers = parser.add_subparsers(
        dest="command", required=True, metavar="{run,eval,bench,sweep,stages}"
    )

    run = subparsers.add_parser("run", help="compute a disparity map")
    _add_pair_flags(run)
    run.add_argument("--out", type=Path, required=True, help="output PFM")
    run.add_argument("--vis", type=Path, help="8-bit PNG visualisation")
    run.add_argument("--depth-out", type=Path, help="depth PFM in metres (needs --calib)")
    _add_param_flags(run)
    run.set_defaults(handler=cmd_run)

    evaluate = subparsers.add_parser("eval", help="bad-N error against ground truth")
    evaluate.add_argument("--pred", type=Path, required=True)
    evaluate.add_argument("--gt", type=Path, required=True)
    evaluate.add_argument("--bad", type=float)
    evaluate.add_argument("--occ", type=Path, help="non-occlusion mask PNG (255 = visible)")
    evaluate.add_argument("--json", help="write the report as JSON ('-' for stdout)")
    evaluate.set_defaults(handler=cmd_eval)

    bench = subparsers.add_parser("bench", help="per-stage timings and MDE/s")
    _add_pair_flags(bench)
    bench.add_argument("--synthetic", help="named benchmark geometry from presets.yaml")
    bench.add_argument("--reps", type=int)
    bench.add_argument("--json")
    _add_param_flags(bench)
    bench.set_defaults(handler=cmd_bench)

    sweep = subparsers.add_parser("sweep", help="bad rate over a W_x x W_y grid")
    sweep.add_argument("--dataset", type=Path, action="append", help="repeatable")
    sweep.add_argument("--left", type=Path)
    sweep.add_argument("--right", type=Path)
    sweep.add_argument("--gt", type=Path)
    sweep.add_argument("--occ", type=Path)
    sweep.add_argument("--wx-list", type=_int_list)
    sweep.add_argument("--wy-list", type=_int_list)
    sweep.add_argument("--bad", type=float)
    sweep.add_argument("--csv", type=Path)
    sweep.add_argument("--json")
    _add_param_flags(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    stages = subparsers.add_parser("stages", help="list pipeline stages")
    stages.set_defaults(handler=cmd_stages)

    # Not listed in the help text.
    oracle = subparsers.add_parser("oracle-run")
    _add_pair_flags(oracle, required=True)
    oracle.add_argument("--out", type=Path, required=True)
    _add_param_flags(oracle)
    oracle.set_defaults(handler=cmd_oracle_run)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    level = args.log_level or str(app_config.runtime_settings()["log_level"])
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (StereoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
