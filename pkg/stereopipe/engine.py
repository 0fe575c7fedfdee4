from __future__ import annotations

import logging
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any

from .core import DisparityMap, GrayImage, effective_scale, require_same_shape, search_range, validate
from .models import Params
from .parallel import WorkerPool
from .stages import register_builtin_stages
from .stages.base import StageContext, StageRegistry, StageSpec

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class PipelineResult:
    disparity: DisparityMap
    outputs: dict[str, Any]
    stage_ms: dict[str, float] = field(default_factory=dict)
    overall_ms: float = 0.0


class PipelineEngine:
    def __init__(self, registry: StageRegistry | None = None, workers: int | None = 1) -> None:
        if registry is None:
            registry = StageRegistry()
            register_builtin_stages(registry)
        self.registry = registry
        self.workers = workers

    def run(self, left: GrayImage, right: GrayImage, params: Params) -> PipelineResult:
        validate(params)
        require_same_shape(left.data, right.data, "left/right input images")
        stages = [self.registry.get(name) for name in self.registry.list_names()]
        ordered = self._topological_sort(stages)
        results: dict[str, dict[str, Any]] = {}
        input_data: dict[str, Any] = {"left_org": left, "right_org": right}

        started = time.perf_counter()
        with WorkerPool(self.workers) as pool:
            ctx = StageContext(
                params=params,
                pool=pool,
                scale=effective_scale(params),
                search_range=search_range(params),
            )
            for spec in ordered:
                payload = self._merge_parent_payloads(spec, results) or input_data
                stage_started = time.perf_counter()
                if spec.label is None:
                    results[spec.name] = spec.handler(ctx, payload)
                else:
                    with ctx.clock.section(spec.label):
                        results[spec.name] = spec.handler(ctx, payload)
                logger.debug(
                    "stage %s finished in %.1f ms",
                    spec.name,
                    (time.perf_counter() - stage_started) * 1000.0,
                )
        overall_ms = (time.perf_counter() - started) * 1000.0

        outputs: dict[str, Any] = {}
        for spec in ordered:
            outputs.update(results[spec.name])
        return PipelineResult(
            disparity=outputs["disparity"],
            outputs=outputs,
            stage_ms=ctx.clock.milliseconds(),
            overall_ms=overall_ms,
        )

    def _merge_parent_payloads(
        self,
        spec: StageSpec,
        results: dict[str, dict[str, Any]],
    ) -> dict[str, Any]:
        merged: dict[str, Any] = {}
        for source in spec.requires:
            merged.update(results.get(source, {}))
        return merged

    def _topological_sort(self, stages: list[StageSpec]) -> list[StageSpec]:
        stage_map = {spec.name: spec for spec in stages}
        indegree: dict[str, int] = defaultdict(int)
        edges: dict[str, list[str]] = defaultdict(list)

        for spec in stages:
            indegree[spec.name] = 0

        for spec in stages:
            for source in spec.requires:
                if source not in stage_map:
                    raise ValueError(f"Stage {spec.name} requires unknown stage: {source}")
                edges[source].append(spec.name)
                indegree[spec.name] += 1

        queue = deque([name for name, deg in indegree.items() if deg == 0])
        order: list[StageSpec] = []

        while queue:
            name = queue.popleft()
            order.append(stage_map[name])
            for target in edges.get(name, []):
                indegree[target] -= 1
                if indegree[target] == 0:
                    queue.append(target)

        if len(order) != len(stages):
            raise ValueError("Pipeline graph has a cycle")

        return order


def run_pipeline(
    left: GrayImage, right: GrayImage, params: Params, workers: int | None = 1
) -> PipelineResult:
    return PipelineEngine(workers=workers).run(left, right, params)
