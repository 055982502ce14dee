
# Naive order-l star stencil used as the timed benchmark kernel.
#
#   for t in timesteps:
#     for k, j, i in interior:
#       dst[k,j,i] = C0 * src[k,j,i] + C1 * (sum of the 6*l axis neighbours)
#     swap(src, dst)
#
# Grids are (KK, JJ, II) float64 arrays in C order, so i is the unit-stride
# dimension and a k index selects one Y-X plane. A ghost layer of width l
# surrounds the interior and is never written. Reads and writes go to
# separate arrays (Jacobi double buffering), so k planes are independent
# within a timestep and threads split the k range statically.
#
# The neighbour sum is formed first and scaled once, which keeps
# C1 = 1/6 over a field of ones exactly equal to one.

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from perfweld.analytical.stencil import StencilConfig
from perfweld.core.exception import BenchError


def allocate_grids(cfg: StencilConfig, fill: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Source and destination grids including the ghost layer, both filled with `fill`."""
    shape = (cfg.KK, cfg.JJ, cfg.II)
    try:
        src = np.full(shape, fill, dtype=np.float64)
        dst = src.copy()
    except MemoryError as exc:
        raise BenchError(
            f"cannot allocate two {shape} float64 grids", {"shape": list(shape)}
        ) from exc
    return src, dst


def update_region(
    src: np.ndarray,
    dst: np.ndarray,
    l: int,  # noqa: E741
    c0: float,
    c1: float,
    ks: slice,
    js: slice,
    is_: slice,
) -> None:
    """Apply the stencil to one box of interior points (slices in padded coordinates)."""
    acc = np.zeros((ks.stop - ks.start, js.stop - js.start, is_.stop - is_.start))
    for r in range(1, l + 1):
        acc += src[ks.start - r:ks.stop - r, js, is_]
        acc += src[ks.start + r:ks.stop + r, js, is_]
        acc += src[ks, js.start - r:js.stop - r, is_]
        acc += src[ks, js.start + r:js.stop + r, is_]
        acc += src[ks, js, is_.start - r:is_.stop - r]
        acc += src[ks, js, is_.start + r:is_.stop + r]
    dst[ks, js, is_] = c0 * src[ks, js, is_] + c1 * acc


def _k_chunks(cfg: StencilConfig, parts: int) -> list[tuple[int, int]]:
    l = cfg.l  # noqa: E741
    bounds = np.linspace(l, l + cfg.K, min(parts, cfg.K) + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _sweep_chunk(
    src: np.ndarray, dst: np.ndarray, cfg: StencilConfig, c0: float, c1: float, k0: int, k1: int
) -> None:
    l = cfg.l  # noqa: E741
    if cfg.blocking is None:
        update_region(
            src, dst, l, c0, c1, slice(k0, k1), slice(l, l + cfg.J), slice(l, l + cfg.I)
        )
        return
    TI, TJ, TK = cfg.blocking
    for kb in range(l, l + cfg.K, TK):
        lo, hi = max(kb, k0), min(kb + TK, k1)
        if lo >= hi:
            continue
        for jb in range(l, l + cfg.J, TJ):
            for ib in range(l, l + cfg.I, TI):
                update_region(
                    src, dst, l, c0, c1, slice(lo, hi), slice(jb, jb + TJ), slice(ib, ib + TI)
                )


def sweep(
    src: np.ndarray,
    dst: np.ndarray,
    cfg: StencilConfig,
    c0: float,
    c1: float,
    pool: ThreadPoolExecutor | None = None,
) -> None:
    """One timestep: write every interior point of `dst` from `src`."""
    if pool is None or cfg.threads == 1:
        _sweep_chunk(src, dst, cfg, c0, c1, cfg.l, cfg.l + cfg.K)
        return
    futures = [
        pool.submit(_sweep_chunk, src, dst, cfg, c0, c1, k0, k1)
        for k0, k1 in _k_chunks(cfg, cfg.threads)
    ]
    for f in futures:
        f.result()


def run_kernel(
    cfg: StencilConfig,
    timesteps: int,
    c0: float,
    c1: float,
    src: np.ndarray | None = None,
    dst: np.ndarray | None = None,
    pool: ThreadPoolExecutor | None = None,
) -> np.ndarray:
    """Run `timesteps` sweeps and return the grid holding the latest values."""
    if timesteps <= 0:
        raise BenchError(f"timesteps must be positive, got {timesteps}")
    if src is None or dst is None:
        src, dst = allocate_grids(cfg)
    for _ in range(timesteps):
        sweep(src, dst, cfg, c0, c1, pool)
        src, dst = dst, src
    return src
