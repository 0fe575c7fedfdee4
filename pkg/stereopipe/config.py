from __future__ import annotations

import logging
import os
from configparser import ConfigParser
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from .errors import ParamsError
from .models import Params

logger = logging.getLogger(__name__)

THREADS_ENV = "STEREOPIPE_THREADS"
PARAMS_SECTION = "params"

# CLI flag spelling -> Params field; parameter files accept either name.
FLAG_FIELDS = {
    "max_disp": "d_max_org",
    "scale": "k_scale",
    "pool_radius": "m_pool",
    "wx": "w_x",
    "wy": "w_y",
    "wx_right": "w_x_right",
    "wy_right": "w_y_right",
    "delta": "delta_arm",
    "tfill": "t_fill",
    "census": "census_offsets",
}

_FALLBACK_SWEEP = {
    "w_x": [5, 9, 21, 41, 61, 141],
    "w_y": [9, 11, 15, 21, 27, 31],
}


def format_offsets(offsets: tuple[tuple[int, int], ...]) -> str:
    return ", ".join(f"{dx}:{dy}" for dx, dy in offsets)


def parse_offsets(text: str) -> tuple[tuple[int, int], ...]:
    offsets: list[tuple[int, int]] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            dx, dy = part.split(":")
            offsets.append((int(dx), int(dy)))
        except ValueError as exc:
            raise ParamsError(f"census_offsets entry {part!r} is not dx:dy") from exc
    return tuple(offsets)


def _field_name(key: str) -> str:
    key = key.strip().replace("-", "_")
    return FLAG_FIELDS.get(key, key)


def params_from_mapping(base: Params, values: dict[str, Any]) -> Params:
    """Overlay loosely typed values (strings from files or flags) onto ``base``."""
    values = {_field_name(key): value for key, value in values.items()}
    known = set(Params.model_fields)
    unknown = sorted(set(values) - known)
    if unknown:
        raise ParamsError(f"unknown parameter(s): {', '.join(unknown)}")
    merged = base.model_dump()
    for key, value in values.items():
        if key == "census_offsets" and isinstance(value, str):
            value = parse_offsets(value)
        elif key in ("w_x_right", "w_y_right") and isinstance(value, str):
            value = None if value.strip().lower() in ("", "none") else value
        merged[key] = value
    try:
        return Params.model_validate(merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ParamsError(f"{field}: {first['msg']}") from exc


def dump_params(params: Params) -> str:
    lines = []
    for key, value in params.model_dump().items():
        if key == "census_offsets":
            value = format_offsets(params.census_offsets)
        elif value is None:
            value = "none"
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def load_params_text(text: str, base: Params | None = None) -> Params:
    parser = ConfigParser()
    if not text.lstrip().startswith("["):
        text = f"[{PARAMS_SECTION}]\n{text}"
    parser.read_string(text)
    values = dict(parser.items(PARAMS_SECTION)) if parser.has_section(PARAMS_SECTION) else {}
    return params_from_mapping(base or Params(), values)


def load_params_file(path: str | Path, base: Params | None = None) -> Params:
    return load_params_text(Path(path).read_text(encoding="utf-8"), base)


class AppConfig:
    def __init__(self, root: Path | None = None) -> None:
        parser = ConfigParser()
        package_root = root or Path(__file__).resolve().parent.parent
        config_path = package_root / "config.ini"
        parser.read(config_path)
        if not parser.sections():
            parser.read(Path("config.ini"))
        self._parser = parser
        presets_path = package_root / "presets.yaml"
        self._presets = self._load_presets(presets_path)

    def default_params(self) -> Params:
        if not self._parser.has_section(PARAMS_SECTION):
            return Params()
        return params_from_mapping(Params(), dict(self._parser.items(PARAMS_SECTION)))

    def runtime_settings(self) -> dict[str, object]:
        threads = self._get_int("runtime", "threads", 0)
        env_threads = os.environ.get(THREADS_ENV, "").strip()
        if env_threads:
            try:
                threads = int(env_threads)
            except ValueError:
                logger.warning("ignoring non-integer %s=%r", THREADS_ENV, env_threads)
        return {
            "threads": threads,
            "log_level": self._get_str("runtime", "log_level", "INFO"),
        }

    def eval_settings(self) -> dict[str, object]:
        return {"bad_threshold": self._get_float("eval", "bad_threshold", 2.0)}

    def bench_settings(self) -> dict[str, object]:
        return {"repetitions": self._get_int("bench", "repetitions", 3)}

    def preset(self, name: str) -> dict[str, Any]:
        presets = self._presets.get("presets", {})
        if not isinstance(presets, dict) or not isinstance(presets.get(name), dict):
            raise ParamsError(f"unknown preset: {name}")
        return dict(presets[name])

    def preset_names(self) -> list[str]:
        presets = self._presets.get("presets", {})
        return sorted(presets) if isinstance(presets, dict) else []

    def sweep_grid(self) -> tuple[list[int], list[int]]:
        sweep = self._presets.get("sweep", {})
        if not isinstance(sweep, dict):
            sweep = {}
        return (
            self._int_list(sweep.get("w_x"), _FALLBACK_SWEEP["w_x"]),
            self._int_list(sweep.get("w_y"), _FALLBACK_SWEEP["w_y"]),
        )

    def benchmark_geometry(self, name: str) -> dict[str, int]:
        datasets = self._presets.get("datasets", {})
        entry = datasets.get(name) if isinstance(datasets, dict) else None
        if not isinstance(entry, dict):
            raise ParamsError(f"unknown benchmark geometry: {name}")
        return {key: int(entry[key]) for key in ("width", "height", "ndisp")}

    def _get_str(self, section: str, key: str, fallback: str) -> str:
        return self._parser.get(section, key, fallback=fallback)

    def _get_int(self, section: str, key: str, fallback: int) -> int:
        return self._parser.getint(section, key, fallback=fallback)

    def _get_float(self, section: str, key: str, fallback: float) -> float:
        return self._parser.getfloat(section, key, fallback=fallback)

    def _int_list(self, value: object, fallback: list[int]) -> list[int]:
        if not isinstance(value, list):
            return list(fallback)
        try:
            return [int(item) for item in value]
        except (TypeError, ValueError):
            return list(fallback)

    def _load_presets(self, path: Path) -> dict[str, object]:
        if not path.exists():
            return {}
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8"))
        except Exception:
            logger.warning("could not parse %s; using built-in presets", path)
            return {}
        return raw if isinstance(raw, dict) else {}


app_config = AppConfig()
