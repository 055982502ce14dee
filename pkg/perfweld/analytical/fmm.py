
# Cost model for the two dominant FMM phases, P2P (near field) and M2L (far
# field), assuming a nearly uniform particle distribution and therefore a full
# oct-tree. Each phase costs max(flop time, memory time); the other phases
# (P2M, M2M, L2L, L2P) are taken as zero.
#
# Flops:
#   P2P: 27 q^2 (N/q) pairwise interactions          -> 27 q N t_c
#   M2L: 189 k^6 per leaf for Cartesian expansions  -> 189 (N k^6 / q) t_c
#
# Memory: the outer loops of both phases behave like sparse matrix-vector
# products, whose cache-oblivious miss bound is O(h/L + H/Z^(1/3)) for an
# H x H matrix with h non-zeros, cache size Z and line length L (elements).
# For P2P this gives
#   Q <= 4 N/L + b_P2P (N/q)/L + 4 N/L + (N/q) / (Z/(4q))^(1/3),   b_P2P = 26
# (coordinates and value of every particle move, hence the factor 4) and the
# dominant access time kept here is
#   N beta + N L / (Z^(1/3) q^(2/3)) beta.
# For M2L, with b_t target cells, b_s source cells, b_M2L = 189 well-separated
# sources per target and f(k) the expansion size,
#   Q <= (b_t + b_s) f(k)/L + b_M2L b_t / L + b_t / (Z/f(k))^(1/3)
# and the higher-order terms give
#   (N k^6 / q) beta + (N k^2 L / (q Z^(1/3))) beta.
# Z is the last cache level and L = W. The thread count never enters: the
# model is serial.

from __future__ import annotations

from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, model_validator

from perfweld.core.exception import FmmConfigError
from perfweld.schema.machine import MachineSpec

P2P_NEIGHBOURS = 27
M2L_OPS = 189


class FmmConfig(BaseModel):
    """N particles, q per leaf, expansion order k. Uniform distributions only."""

    model_config = ConfigDict(frozen=True)

    N: int = Field(gt=0)
    q: int = Field(gt=0)
    k: int = Field(ge=2)
    threads: int = Field(default=1, gt=0)
    distribution: str = "uniform"

    @model_validator(mode="after")
    def _check(self) -> FmmConfig:
        if self.q > self.N:
            raise ValueError(f"q={self.q} exceeds N={self.N}")
        if self.distribution != "uniform":
            raise ValueError("only uniform particle distributions are modeled")
        return self


def make_fmm_config(**fields) -> FmmConfig:
    try:
        return FmmConfig(**fields)
    except ValueError as exc:
        raise FmmConfigError(f"invalid FMM config: {exc}", {"fields": fields}) from exc


def _cache_terms(spec: MachineSpec) -> tuple[float, float]:
    """(L, Z^(1/3)) with Z the outermost cache in elements."""
    return float(spec.W), float(spec.last_level.size_elements) ** (1.0 / 3.0)


def p2p_flop_time(cfg: FmmConfig, spec: MachineSpec) -> float:
    return P2P_NEIGHBOURS * cfg.q * cfg.N * spec.t_c


def m2l_flop_time(cfg: FmmConfig, spec: MachineSpec) -> float:
    return M2L_OPS * (cfg.N * cfg.k**6 / cfg.q) * spec.t_c


def p2p_mem_time(cfg: FmmConfig, spec: MachineSpec) -> float:
    L, z_cbrt = _cache_terms(spec)
    return cfg.N * spec.beta_mem + (cfg.N * L / (z_cbrt * cfg.q ** (2.0 / 3.0))) * spec.beta_mem


def m2l_mem_time(cfg: FmmConfig, spec: MachineSpec) -> float:
    L, z_cbrt = _cache_terms(spec)
    return (cfg.N * cfg.k**6 / cfg.q) * spec.beta_mem + (
        cfg.N * cfg.k**2 * L / (cfg.q * z_cbrt)
    ) * spec.beta_mem


@dataclass(frozen=True)
class FmmCostBreakdown:
    T_flop_p2p: float
    T_mem_p2p: float
    T_flop_m2l: float
    T_mem_m2l: float

    @property
    def T_p2p(self) -> float:
        return max(self.T_flop_p2p, self.T_mem_p2p)

    @property
    def T_m2l(self) -> float:
        return max(self.T_flop_m2l, self.T_mem_m2l)

    @property
    def T_total(self) -> float:
        return self.T_p2p + self.T_m2l


def fmm_time(cfg: FmmConfig, spec: MachineSpec) -> tuple[float, FmmCostBreakdown]:
    """Sum over phases of per-phase max(flop, memory)."""
    breakdown = FmmCostBreakdown(
        T_flop_p2p=p2p_flop_time(cfg, spec),
        T_mem_p2p=p2p_mem_time(cfg, spec),
        T_flop_m2l=m2l_flop_time(cfg, spec),
        T_mem_m2l=m2l_mem_time(cfg, spec),
    )
    return breakdown.T_total, breakdown
