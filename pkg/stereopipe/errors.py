from __future__ import annotations


class StereoError(Exception):
    """Base class for every error the pipeline reports to its caller."""


class ParamsError(StereoError, ValueError):
    pass


class DimensionError(StereoError, ValueError):
    pass


class ImageFormatError(StereoError):
    pass


class PfmFormatError(StereoError):
    pass


class CalibrationError(StereoError):
    pass


class ValueRangeError(StereoError, ValueError):
    pass
