"""Deterministic local stereo matcher with a scale-down / scale-up frame."""

from .engine import PipelineEngine, PipelineResult, run_pipeline
from .models import Params

__all__ = [
    "Params",
    "PipelineEngine",
    "PipelineResult",
    "run_pipeline",
]
