from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import INVALID, DisparityMap, GrayImage
from .errors import CalibrationError, ImageFormatError, PfmFormatError
from .models import Calibration
from .preprocess import to_gray

logger = logging.getLogger(__name__)

_EIGHT_BIT_MODES = {"1", "L", "LA", "P", "PA", "RGB", "RGBA"}


def read_image(path: str | Path) -> GrayImage:
    """Decode PGM/PPM (plain or raw) or 8-bit PNG into a gray image."""
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode not in _EIGHT_BIT_MODES:
                raise ImageFormatError(f"{path}: unsupported bit depth (mode {mode})")
            if mode in ("1", "L", "LA"):
                return GrayImage(np.asarray(img.convert("L")))
            return to_gray(np.asarray(img.convert("RGB")))
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageFormatError(f"{path}: unreadable image ({exc})") from exc


def read_mask(path: str | Path) -> np.ndarray:
    return read_image(path).data.copy()


def write_png(data: np.ndarray, path: str | Path) -> None:
    Image.fromarray(np.asarray(data, dtype=np.uint8)).save(path)


def render_disparity(d: DisparityMap, d_max: float) -> np.ndarray:
    """8-bit visualisation normalised by ``d_max``; INVALID renders as 0."""
    scaled = np.where(d.valid_mask(), d.data, 0.0) * (255.0 / d_max)
    return np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)


def read_pfm(path: str | Path) -> DisparityMap:
    with open(path, "rb") as handle:
        kind = handle.readline().strip()
        if kind != b"Pf":
            raise PfmFormatError(f"{path}: expected a single-channel 'Pf' header, got {kind!r}")
        dims = re.findall(rb"\d+", handle.readline())
        if len(dims) != 2:
            raise PfmFormatError(f"{path}: malformed dimension line")
        width, height = int(dims[0]), int(dims[1])
        try:
            scale = float(handle.readline().strip())
        except ValueError as exc:
            raise PfmFormatError(f"{path}: malformed scale line") from exc
        if scale == 0.0:
            raise PfmFormatError(f"{path}: scale must be nonzero")
        dtype = "<f4" if scale < 0 else ">f4"
        buffer = handle.read(width * height * 4)
    if len(buffer) != width * height * 4:
        raise PfmFormatError(f"{path}: expected {width * height} samples, file is truncated")
    values = np.frombuffer(buffer, dtype=dtype).reshape(height, width)
    values = np.flipud(values).astype(np.float64)
    return DisparityMap(np.where(np.isfinite(values) & (values >= 0), values, INVALID))


def write_pfm(d: DisparityMap | np.ndarray, path: str | Path) -> None:
    data = d.data if isinstance(d, DisparityMap) else np.asarray(d, dtype=np.float64)
    if np.isnan(data).any():
        raise PfmFormatError("refusing to write NaN values to PFM")
    height, width = data.shape
    header = f"Pf\n{width} {height}\n-1.0\n".encode("ascii")
    body = np.flipud(data).astype("<f4").tobytes()
    Path(path).write_bytes(header + body)


def read_middlebury_calib(path: str | Path) -> Calibration:
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CalibrationError(f"{path}: unreadable calibration file ({exc})") from exc
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if "=" not in line:
            raise CalibrationError(f"{path}:{number}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()

    def required_int(key: str) -> int:
        if key not in entries:
            raise CalibrationError(f"{path}: missing {key}")
        try:
            return int(float(entries[key]))
        except ValueError as exc:
            raise CalibrationError(f"{path}: {key} is not a number") from exc

    def optional_float(key: str) -> float | None:
        try:
            return float(entries[key]) if key in entries else None
        except ValueError as exc:
            raise CalibrationError(f"{path}: {key} is not a number") from exc

    focal = None
    if "cam0" in entries:
        numbers = re.findall(r"[-+]?\d*\.?\d+(?:[eE][-+]?\d+)?", entries["cam0"])
        if numbers:
            focal = float(numbers[0])
    return Calibration(
        d_max_org=required_int("ndisp"),
        width=required_int("width"),
        height=required_int("height"),
        focal=focal,
        baseline=optional_float("baseline"),
        doffs=optional_float("doffs") or 0.0,
    )


@dataclass(slots=True)
class MiddleburyPair:
    name: str
    left: Path
    right: Path
    gt: Path | None
    occ_mask: Path | None
    calib: Path | None


def find_middlebury_pair(directory: str | Path) -> MiddleburyPair:
    root = Path(directory)
    left, right = root / "im0.png", root / "im1.png"
    if not left.exists() or not right.exists():
        raise ImageFormatError(f"{root}: expected im0.png and im1.png")

    def optional(name: str) -> Path | None:
        candidate = root / name
        return candidate if candidate.exists() else None

    pair = MiddleburyPair(
        name=root.name,
        left=left,
        right=right,
        gt=optional("disp0GT.pfm"),
        occ_mask=optional("mask0nocc.png"),
        calib=optional("calib.txt"),
    )
    logger.debug("dataset %s: gt=%s calib=%s", pair.name, pair.gt, pair.calib)
    return pair
