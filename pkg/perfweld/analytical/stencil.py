
# Closed-form execution-time model for an order-l 3-D star stencil
# (l = 1 is the 7-point stencil) over a cache hierarchy.
#
# Per k-iteration the kernel streams P_read = 2l+1 input planes of II x JJ
# elements and writes one I x J plane. The number of II x JJ planes each
# cache level has to re-fetch (nplanes) follows a four-way conditional on the
# cache size, smoothed by linear interpolation between the case boundaries.
# Misses are counted in cachelines; time per level is W * beta per hit.
#
# Flop time is not modeled: the kernel is memory bound and arithmetic overlaps
# with memory traffic.
#
# Spatial blocking reassigns the dimensions to one TI x TJ x TK block (I and
# II rounded up to whole cachelines) and multiplies misses by the block count.

from __future__ import annotations

import math
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from perfweld.core.exception import StencilConfigError
from perfweld.schema.machine import MachineSpec


class CachePolicy(StrEnum):
    WRITE_ALLOCATE = "write-allocate"
    NO_WRITE_ALLOCATE = "no-write-allocate"


class StencilConfig(BaseModel):
    """Interior grid I x J x K, stencil order l, optional TI x TJ x TK blocking."""

    model_config = ConfigDict(frozen=True)

    I: int = Field(gt=0)  # noqa: E741
    J: int = Field(gt=0)
    K: int = Field(gt=0)
    l: int = Field(default=1, gt=0)  # noqa: E741
    blocking: tuple[int, int, int] | None = None
    # Carried for schema compatibility; the model is serial.
    threads: int = Field(default=1, gt=0)
    cache_policy: CachePolicy = CachePolicy.WRITE_ALLOCATE

    @model_validator(mode="after")
    def _check_blocking(self) -> StencilConfig:
        if self.blocking is None:
            return self
        for name, tile, dim in zip(("TI", "TJ", "TK"), self.blocking, (self.I, self.J, self.K)):
            if tile <= 0:
                raise ValueError(f"{name} must be positive, got {tile}")
            if tile > dim or dim % tile:
                raise ValueError(f"{name}={tile} must divide its dimension {dim}")
        return self

    @property
    def P_read(self) -> int:
        return 2 * self.l + 1

    @property
    def II(self) -> int:
        return self.I + 2 * self.l

    @property
    def JJ(self) -> int:
        return self.J + 2 * self.l

    @property
    def KK(self) -> int:
        return self.K + 2 * self.l


def make_stencil_config(**fields) -> StencilConfig:
    """StencilConfig constructor that reports invariant violations as StencilConfigError."""
    try:
        return StencilConfig(**fields)
    except ValueError as exc:
        raise StencilConfigError(f"invalid stencil config: {exc}", {"fields": fields}) from exc


@dataclass(frozen=True)
class _Geometry:
    """Dimensions the miss model works on: the full grid, or one block of it."""

    I: int  # noqa: E741
    J: int
    II: int
    JJ: int
    KK: int
    P_read: int
    NB: int
    write_allocate: bool

    @property
    def S_read(self) -> int:
        return self.II * self.JJ

    @property
    def S_write(self) -> int:
        return self.I * self.J

    @property
    def S_total(self) -> int:
        if self.write_allocate:
            return self.P_read * self.S_read + self.S_write
        return self.P_read * self.S_read

    @property
    def rows_per_sweep(self) -> int:
        """II-long rows read by one sweep over all blocks."""
        return self.JJ * self.KK * self.NB


def _geometry(cfg: StencilConfig, W: int, blocked: bool | None = None) -> _Geometry:
    use_blocks = cfg.blocking is not None if blocked is None else blocked
    wa = cfg.cache_policy is CachePolicy.WRITE_ALLOCATE
    if not use_blocks:
        return _Geometry(cfg.I, cfg.J, cfg.II, cfg.JJ, cfg.KK, cfg.P_read, 1, wa)
    if cfg.blocking is None:
        raise StencilConfigError(
            "blocked miss model requested but the config has no blocking (TI, TJ, TK)",
            {"I": cfg.I, "J": cfg.J, "K": cfg.K},
        )
    TI, TJ, TK = cfg.blocking
    l = cfg.l  # noqa: E741
    NB = (cfg.I // TI) * (cfg.J // TJ) * (cfg.K // TK)
    return _Geometry(
        I=math.ceil(TI / W) * W,
        J=TJ,
        II=math.ceil((TI + 2 * l) / W) * W,
        JJ=TJ + 2 * l,
        KK=TK + 2 * l,
        P_read=cfg.P_read,
        NB=NB,
        write_allocate=wa,
    )


# ------------------------------------------------------------------
# Plane traffic and nplanes
# ------------------------------------------------------------------

def plane_traffic(cfg: StencilConfig) -> int:
    """Elements touched to compute one Y-X plane (one k iteration)."""
    return _geometry(cfg, 1, blocked=False).S_total


def nplanes_boundaries(
    cfg: StencilConfig, W: int, blocked: bool | None = None
) -> tuple[float, ...]:
    """
    Cache sizes (elements) where the governing predicate of each case flips,
    ascending: R4 stops holding, R3 starts holding, R2 stops holding, R1 holds.

    With x = size/W and R_col = P/(2P-1) the predicates are
        R1: x*R_col >= S_total    R2: x > S_total
        R3: x*R_col >  S_read     R4: x*R_col < P*II
    x mixes line and element units exactly as the predicates are stated.
    """
    g = _geometry(cfg, W, blocked)
    P = g.P_read
    r_col = P / (2 * P - 1)
    b4 = P * g.II / r_col
    b3 = g.S_read / r_col
    b2 = float(g.S_total)
    b1 = g.S_total / r_col
    return tuple(W * b for b in (b4, b3, b2, b1))


def nplanes_for_size(
    size_elements: float, cfg: StencilConfig, W: int, blocked: bool | None = None
) -> float:
    """
    nplanes for a cache of `size_elements`, in [1, 2P-1].

    Pinned to 2P-1, P, P-1, 1 at the four boundaries and linear in the cache
    size in between, so the result is non-increasing in size. When JJ == P (J = 1)
    the R4 and R3 boundaries coincide; the interval between them is empty and
    nplanes drops from 2P-1 to P at that size. A size sitting on a boundary
    takes the value of the interval that starts there.
    """
    g = _geometry(cfg, W, blocked)
    P = g.P_read
    anchors = nplanes_boundaries(cfg, W, blocked)
    values = (2.0 * P - 1.0, float(P), P - 1.0, 1.0)
    if size_elements < anchors[0]:
        return values[0]
    if size_elements >= anchors[-1]:
        return values[-1]
    # anchors[i] <= size < anchors[i + 1]; side="right" steps over repeated anchors
    i = int(np.searchsorted(anchors, size_elements, side="right")) - 1
    lo, hi = anchors[i], anchors[i + 1]
    return float(values[i] + (values[i + 1] - values[i]) * (size_elements - lo) / (hi - lo))


def nplanes(
    level_index: int, cfg: StencilConfig, spec: MachineSpec, blocked: bool | None = None
) -> float:
    if not 0 <= level_index < len(spec.cache_levels):
        raise StencilConfigError(
            f"cache level {level_index} out of range", {"levels": len(spec.cache_levels)}
        )
    return nplanes_for_size(spec.cache_levels[level_index].size_elements, cfg, spec.W, blocked)


# ------------------------------------------------------------------
# Misses and time
# ------------------------------------------------------------------

def _line_planes(g: _Geometry, W: int) -> int:
    """ceil(II/W) * JJ * KK * NB: cachelines of one full sweep over the read grid."""
    return math.ceil(g.II / W) * g.rows_per_sweep


def misses(
    level_index: int, cfg: StencilConfig, spec: MachineSpec, blocked: bool | None = None
) -> float:
    """
    Cacheline misses at one level: ceil(II/W) * JJ * KK * nplanes (* NB when blocked).

    `blocked=None` uses the blocked form exactly when the config carries blocking;
    `blocked=True` on an unblocked config is an error.
    """
    g = _geometry(cfg, spec.W, blocked)
    return _line_planes(g, spec.W) * nplanes(level_index, cfg, spec, blocked)


def level0_accesses(cfg: StencilConfig, W: int, blocked: bool | None = None) -> float:
    """Cacheline-granular accesses of a sweep, the reference for L1 hits."""
    g = _geometry(cfg, W, blocked)
    return float(_line_planes(g, W) * (g.P_read + 1))


@dataclass(frozen=True)
class LevelCost:
    misses: float
    hits: float
    nplanes: float
    T: float


@dataclass(frozen=True)
class StencilCostBreakdown:
    """Per-level misses/hits/time for one timestep plus main-memory time."""

    levels: tuple[LevelCost, ...]
    T_mem: float
    S_total: int
    timesteps: int

    @property
    def per_timestep(self) -> float:
        return sum(lvl.T for lvl in self.levels) + self.T_mem

    @property
    def total(self) -> float:
        return self.timesteps * self.per_timestep


def stencil_time(
    cfg: StencilConfig, spec: MachineSpec, timesteps: int = 1
) -> tuple[float, StencilCostBreakdown]:
    """
    T = timesteps * (sum_i T_Li + T_mem) with
        T_Li  = W * beta_Li * max(0, Misses_{i-1} - Misses_i)
        T_mem = W * beta_mem * Misses_{last}
    """
    if timesteps <= 0:
        raise StencilConfigError(f"timesteps must be positive, got {timesteps}")

    W = spec.W
    previous = level0_accesses(cfg, W)
    levels = []
    for i, cache in enumerate(spec.cache_levels):
        n_planes = nplanes(i, cfg, spec)
        miss = misses(i, cfg, spec)
        hits = max(0.0, previous - miss)
        levels.append(LevelCost(misses=miss, hits=hits, nplanes=n_planes, T=W * cache.beta * hits))
        previous = miss

    breakdown = StencilCostBreakdown(
        levels=tuple(levels),
        T_mem=W * spec.beta_mem * previous,
        S_total=_geometry(cfg, W).S_total,
        timesteps=timesteps,
    )
    return breakdown.total, breakdown
