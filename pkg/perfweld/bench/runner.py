
# Timed stencil benchmark: expand a BenchPlan into stencil configs, run the
# naive kernel for each, and emit one dataset row per config with the median
# wall-clock time of the repetitions that follow the warmup runs.
#
# The runner owns the machine while measuring: points run one after another.
# A point whose median is below the trusted timer floor is reported and
# dropped from the dataset. Unblocked points record b_i = b_j = b_k = 0.

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from perfweld.analytical.model import UNBLOCKED
from perfweld.analytical.stencil import StencilConfig, make_stencil_config
from perfweld.bench.kernel import allocate_grids, run_kernel
from perfweld.core.config import get_settings
from perfweld.core.exception import BenchError, StencilConfigError
from perfweld.core.io import read_json
from perfweld.logging.logger import get_logger
from perfweld.schema.dataset import STENCIL_SCHEMA, Dataset

log = get_logger(__name__)

# The naive kernel does no unrolling; u is recorded as-is for the feature vector.
NO_UNROLL = 0


class AxisRange(BaseModel):
    """Inclusive start..stop with a fixed stride, e.g. 16..128 step 16."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(gt=0)
    stop: int = Field(gt=0)
    stride: int = Field(default=1, gt=0)

    @model_validator(mode="after")
    def _check_order(self) -> AxisRange:
        if self.stop < self.start:
            raise ValueError(f"stop {self.stop} is below start {self.start}")
        return self

    def values(self) -> list[int]:
        return list(range(self.start, self.stop + 1, self.stride))


Axis = list[int] | AxisRange


def axis_values(axis: Axis) -> list[int]:
    return axis.values() if isinstance(axis, AxisRange) else list(axis)


class BenchPlan(BaseModel):
    """
    Grid sweep x blocking grid x thread counts.

    cubic=True pairs the axes as I=J=K=n over the values of I; otherwise the
    full I x J x K product is swept. blocks=None runs unblocked; listed block
    sizes that do not divide a grid are skipped for that grid.
    """

    model_config = ConfigDict(frozen=True)

    I: Axis  # noqa: E741
    J: Axis | None = None
    K: Axis | None = None
    cubic: bool = False
    blocks: list[tuple[int, int, int]] | None = None
    threads: list[int] = Field(default_factory=lambda: [1])
    l: int = Field(default=1, gt=0)  # noqa: E741
    timesteps: int = Field(default=1, gt=0)
    repetitions: int | None = Field(default=None, ge=1)
    warmup: int | None = Field(default=None, ge=0)
    c0: float = 0.4
    c1: float = 0.1

    @model_validator(mode="after")
    def _check_axes(self) -> BenchPlan:
        if not axis_values(self.I):
            raise ValueError("axis I has no values")
        if not self.cubic:
            if self.J is None or self.K is None:
                raise ValueError("J and K are required unless cubic is set")
            if not axis_values(self.J) or not axis_values(self.K):
                raise ValueError("axes J and K need at least one value")
        if any(v <= 0 for v in self._all_dims()):
            raise ValueError("grid dimensions must be positive")
        if not self.threads or any(t <= 0 for t in self.threads):
            raise ValueError("threads must be a nonempty list of positive counts")
        if self.blocks is not None and not self.blocks:
            raise ValueError("blocks must be null or a nonempty list")
        return self

    def _all_dims(self) -> list[int]:
        dims = axis_values(self.I)
        if self.J is not None and self.K is not None and not self.cubic:
            dims += axis_values(self.J) + axis_values(self.K)
        return dims

    def grids(self) -> list[tuple[int, int, int]]:
        if self.cubic:
            return [(n, n, n) for n in axis_values(self.I)]
        assert self.J is not None and self.K is not None
        axes = (axis_values(self.I), axis_values(self.J), axis_values(self.K))
        return list(itertools.product(*axes))

    def configs(self) -> list[StencilConfig]:
        out = []
        blockings = self.blocks if self.blocks is not None else [None]
        for grid, blocking, t in itertools.product(self.grids(), blockings, self.threads):
            I, J, K = grid  # noqa: E741
            try:
                out.append(
                    make_stencil_config(I=I, J=J, K=K, l=self.l, blocking=blocking, threads=t)
                )
            except StencilConfigError:
                log.debug("bench_block_skipped", I=I, J=J, K=K, blocking=blocking)
        if not out:
            raise BenchError("bench plan expands to no valid points")
        return out


def load_bench_plan(path: str | Path) -> BenchPlan:
    try:
        raw = read_json(path)
    except orjson.JSONDecodeError as exc:
        raise BenchError(f"bench plan is not valid JSON: {exc}", {"path": str(path)}) from exc
    try:
        return BenchPlan.model_validate(raw)
    except ValidationError as exc:
        raise BenchError(f"invalid bench plan: {exc}", {"path": str(path)}) from exc


def timer_floor() -> float:
    """Shortest median the runner trusts, in seconds."""
    resolution = time.get_clock_info("perf_counter").resolution
    return resolution * get_settings().timer_resolution_factor


def measure_point(
    cfg: StencilConfig,
    timesteps: int,
    repetitions: int,
    warmup: int,
    c0: float,
    c1: float,
) -> float:
    """Median wall-clock seconds of `repetitions` kernel runs after `warmup` untimed runs."""
    src, dst = allocate_grids(cfg)
    pool = ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None
    try:
        for _ in range(warmup):
            run_kernel(cfg, timesteps, c0, c1, src, dst, pool)
        samples = []
        for _ in range(repetitions):
            start = time.perf_counter()
            run_kernel(cfg, timesteps, c0, c1, src, dst, pool)
            samples.append(time.perf_counter() - start)
    finally:
        if pool is not None:
            pool.shutdown()
    return float(np.median(samples))


def run_stencil_bench(plan: BenchPlan) -> Dataset:
    settings = get_settings()
    repetitions = plan.repetitions or settings.bench_repetitions
    warmup = settings.bench_warmup if plan.warmup is None else plan.warmup

    cores = os.cpu_count() or 1
    too_many = [t for t in plan.threads if t > cores]
    if too_many:
        raise BenchError(
            f"thread counts {too_many} exceed the {cores} available cores",
            {"threads": plan.threads, "cores": cores},
        )

    floor = timer_floor()
    configs = plan.configs()
    rows = []
    for cfg in configs:
        seconds = measure_point(cfg, plan.timesteps, repetitions, warmup, plan.c0, plan.c1)
        if seconds < floor:
            log.warning(
                "bench_point_skipped",
                reason="below timer resolution",
                I=cfg.I, J=cfg.J, K=cfg.K, median_seconds=seconds, floor_seconds=floor,
            )
            continue
        b_i, b_j, b_k = cfg.blocking or UNBLOCKED
        rows.append(((cfg.I, cfg.J, cfg.K, b_i, b_j, b_k, NO_UNROLL, cfg.threads), seconds))
        log.info(
            "bench_point_measured",
            I=cfg.I, J=cfg.J, K=cfg.K, blocking=cfg.blocking, threads=cfg.threads,
            median_seconds=seconds,
        )

    if not rows:
        raise BenchError("every bench point fell below the timer resolution")
    log.info("bench_done", points=len(rows), skipped=len(configs) - len(rows))
    return Dataset.from_rows(STENCIL_SCHEMA, rows)
