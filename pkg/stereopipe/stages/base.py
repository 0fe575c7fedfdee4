from __future__ import annotations

import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

from ..models import Params
from ..parallel import WorkerPool


class Stopwatch:
    def __init__(self) -> None:
        self.seconds: dict[str, float] = defaultdict(float)

    @contextmanager
    def section(self, label: str) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        finally:
            self.seconds[label] += time.perf_counter() - started

    def milliseconds(self) -> dict[str, float]:
        return {label: value * 1000.0 for label, value in self.seconds.items()}


@dataclass(slots=True)
class StageContext:
    params: Params
    pool: WorkerPool
    scale: int
    search_range: int
    clock: Stopwatch = field(default_factory=Stopwatch)


StageHandler = Callable[[StageContext, dict[str, Any]], dict[str, Any]]


@dataclass(slots=True)
class StageSpec:
    name: str
    description: str
    handler: StageHandler
    requires: tuple[str, ...] = ()
    # Timing label; None for stages that time their own sections.
    label: str | None = None


class StageRegistry:
    def __init__(self) -> None:
        self._stages: dict[str, StageSpec] = {}

    def register(self, spec: StageSpec) -> None:
        self._stages[spec.name] = spec

    def get(self, name: str) -> StageSpec:
        if name not in self._stages:
            raise KeyError(f"Unknown stage: {name}")
        return self._stages[name]

    def list_names(self) -> list[str]:
        return list(self._stages)

    def list_specs(self) -> list[dict[str, str]]:
        return [
            {
                "name": spec.name,
                "label": spec.label or "-",
                "requires": ", ".join(spec.requires) or "-",
                "description": spec.description,
            }
            for spec in self._stages.values()
        ]
