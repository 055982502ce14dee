
# Trace-driven cache simulation of one sweep of the naive stencil kernel.
#
# Memory layout: src then dst, each (KK, JJ, IIp) with rows padded to
# IIp = ceil(II/W) * W elements, so every row starts on a cacheline and line
# ids are address // W. Per interior point the kernel reads the centre and
# its 6*l axis neighbours from src, then writes dst. Under no-write-allocate
# the writes bypass the cache and are left out of the trace.
#
# The cache is fully associative with LRU replacement. Repeated accesses to
# the most recently used line are hits that leave the LRU order unchanged, so
# they are collapsed before simulation.

from __future__ import annotations

import math
from collections import OrderedDict

import numpy as np

from perfweld.analytical.stencil import CachePolicy, StencilConfig
from perfweld.core.config import get_settings
from perfweld.core.exception import TraceLimitError
from perfweld.schema.machine import CacheLevel, MachineSpec


def padded_row(cfg: StencilConfig, W: int) -> int:
    return math.ceil(cfg.II / W) * W


def _neighbour_offsets(cfg: StencilConfig, row: int) -> np.ndarray:
    """Element offsets read for one point: centre first, then the kernel's neighbour order."""
    plane = row * cfg.JJ
    offsets = [0]
    for r in range(1, cfg.l + 1):
        offsets += [-r * plane, r * plane, -r * row, r * row, -r, r]
    return np.asarray(offsets, dtype=np.int64)


def _points(cfg: StencilConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(k, j, i) of every interior point in traversal order, in padded coordinates."""
    l = cfg.l  # noqa: E741
    if cfg.blocking is None:
        boxes = [(l, l + cfg.K, l, l + cfg.J, l, l + cfg.I)]
    else:
        TI, TJ, TK = cfg.blocking
        boxes = [
            (kb, kb + TK, jb, jb + TJ, ib, ib + TI)
            for kb in range(l, l + cfg.K, TK)
            for jb in range(l, l + cfg.J, TJ)
            for ib in range(l, l + cfg.I, TI)
        ]
    ks, js, is_ = [], [], []
    for k0, k1, j0, j1, i0, i1 in boxes:
        k, j, i = np.meshgrid(
            np.arange(k0, k1), np.arange(j0, j1), np.arange(i0, i1), indexing="ij"
        )
        ks.append(k.ravel())
        js.append(j.ravel())
        is_.append(i.ravel())
    return np.concatenate(ks), np.concatenate(js), np.concatenate(is_)


def check_trace_limit(cfg: StencilConfig) -> None:
    limit = get_settings().trace_limit
    if max(cfg.I, cfg.J, cfg.K) > limit:
        raise TraceLimitError(
            f"grid {cfg.I}x{cfg.J}x{cfg.K} exceeds the trace limit of {limit} per edge",
            {"I": cfg.I, "J": cfg.J, "K": cfg.K, "limit": limit},
        )


def stencil_trace(cfg: StencilConfig, W: int) -> np.ndarray:
    """Cacheline ids touched by one sweep, in access order (duplicates kept)."""
    check_trace_limit(cfg)
    row = padded_row(cfg, W)
    k, j, i = _points(cfg)
    base = (k * cfg.JJ + j) * row + i
    reads = base[:, None] + _neighbour_offsets(cfg, row)[None, :]
    if cfg.cache_policy is CachePolicy.NO_WRITE_ALLOCATE:
        addresses = reads
    else:
        dst_start = cfg.KK * cfg.JJ * row
        addresses = np.column_stack([reads, dst_start + base])
    return addresses.ravel() // W


def collapse_repeats(lines: np.ndarray) -> np.ndarray:
    if lines.size == 0:
        return lines
    keep = np.empty(lines.shape[0], dtype=bool)
    keep[0] = True
    np.not_equal(lines[1:], lines[:-1], out=keep[1:])
    return lines[keep]


def lru_misses(lines: np.ndarray, capacity_lines: int) -> int:
    """Misses of a fully associative LRU cache holding `capacity_lines` lines."""
    if capacity_lines < 1:
        raise TraceLimitError(f"cache must hold at least one line, got {capacity_lines}")
    cache: OrderedDict[int, None] = OrderedDict()
    misses = 0
    for line in collapse_repeats(lines).tolist():
        if line in cache:
            cache.move_to_end(line)
            continue
        misses += 1
        if len(cache) >= capacity_lines:
            cache.popitem(last=False)
        cache[line] = None
    return misses


def simulate_misses(cfg: StencilConfig, level: CacheLevel, spec: MachineSpec) -> int:
    """Exact LRU miss count of one kernel sweep for a cache of `level.size_elements`."""
    return lru_misses(stencil_trace(cfg, spec.W), level.size_elements // spec.W)
