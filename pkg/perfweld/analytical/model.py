
# Analytical models behind the FittedModel interface.
#
# Dataset rows are mapped to model configs by feature name:
#   stencil: I, J, K required; b_i, b_j, b_k (all three) switch on blocking,
#            except that b = (0, 0, 0) marks a row that ran unblocked;
#            t is read as the thread count; u and anything else is ignored.
#   fmm:     N, q, k required; t read as the thread count.

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from perfweld.analytical.fmm import fmm_time, make_fmm_config
from perfweld.analytical.stencil import CachePolicy, make_stencil_config, stencil_time
from perfweld.core.exception import AnalyticalModelError, PerfweldError, SchemaMismatchError
from perfweld.schema.dataset import DatasetSchema
from perfweld.schema.machine import MachineSpec
from perfweld.schema.model import ModelKind

STENCIL_REQUIRED = ("I", "J", "K")
STENCIL_BLOCKING = ("b_i", "b_j", "b_k")
# Block sizes recorded for a row that ran unblocked.
UNBLOCKED = (0, 0, 0)
FMM_REQUIRED = ("N", "q", "k")


class AnalyticalConfig(BaseModel):
    """Which closed-form model to use and the machine it runs on."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["stencil", "fmm"]
    machine: MachineSpec
    order: int = Field(default=1, gt=0)
    cache_policy: CachePolicy = CachePolicy.WRITE_ALLOCATE
    timesteps: int = Field(default=1, gt=0)

    @field_validator("machine", mode="before")
    @classmethod
    def _machine_from_file_format(cls, v: Any) -> Any:
        if isinstance(v, dict) and "cache_levels" in v and "element_bytes" in v:
            return MachineSpec.from_file_dict(v)
        return v

    @field_serializer("machine")
    def _machine_to_file_format(self, machine: MachineSpec) -> dict[str, Any]:
        return machine.to_file_dict()

    @property
    def model_kind(self) -> ModelKind:
        return ModelKind.ANALYTICAL_STENCIL if self.kind == "stencil" else ModelKind.ANALYTICAL_FMM

    @property
    def required_features(self) -> tuple[str, ...]:
        return STENCIL_REQUIRED if self.kind == "stencil" else FMM_REQUIRED


def _as_int(value: float, name: str, row_index: int) -> int:
    if not float(value).is_integer():
        raise AnalyticalModelError(
            f"feature '{name}' must be integral, got {value}", row_index, {"feature": name}
        )
    return int(value)


@dataclass(frozen=True)
class AnalyticalModel:
    """Closed-form predictor evaluated row by row."""

    config: AnalyticalConfig
    schema: DatasetSchema

    def __post_init__(self) -> None:
        self.schema.require(self.config.required_features, f"{self.config.kind} analytical model")
        if self.config.kind == "stencil":
            present = [n for n in STENCIL_BLOCKING if n in self.schema.feature_names]
            if present and len(present) != len(STENCIL_BLOCKING):
                raise SchemaMismatchError(
                    f"blocking needs all of {list(STENCIL_BLOCKING)}, found {present}"
                )

    @property
    def kind(self) -> ModelKind:
        return self.config.model_kind

    def _feature(self, x: np.ndarray, name: str, row_index: int) -> int | None:
        if name not in self.schema.feature_names:
            return None
        return _as_int(x[self.schema.index_of(name)], name, row_index)

    def predict_row(self, x: np.ndarray, row_index: int = 0) -> float:
        try:
            if self.config.kind == "stencil":
                blocking = None
                if "b_i" in self.schema.feature_names:
                    blocking = tuple(self._feature(x, n, row_index) for n in STENCIL_BLOCKING)
                    if blocking == UNBLOCKED:
                        blocking = None
                cfg = make_stencil_config(
                    I=self._feature(x, "I", row_index),
                    J=self._feature(x, "J", row_index),
                    K=self._feature(x, "K", row_index),
                    l=self.config.order,
                    blocking=blocking,
                    threads=self._feature(x, "t", row_index) or 1,
                    cache_policy=self.config.cache_policy,
                )
                seconds, _ = stencil_time(cfg, self.config.machine, self.config.timesteps)
            else:
                cfg = make_fmm_config(
                    N=self._feature(x, "N", row_index),
                    q=self._feature(x, "q", row_index),
                    k=self._feature(x, "k", row_index),
                    threads=self._feature(x, "t", row_index) or 1,
                )
                seconds, _ = fmm_time(cfg, self.config.machine)
        except AnalyticalModelError:
            raise
        except PerfweldError as exc:
            raise AnalyticalModelError(exc.message, row_index, exc.context) from exc
        return seconds

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.array([self.predict_row(x, i) for i, x in enumerate(X)], dtype=np.float64)

    def accepts(self, x: np.ndarray) -> bool:
        """True when the row maps to a valid config."""
        try:
            self.predict_row(x)
        except AnalyticalModelError:
            return False
        return True

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": str(self.kind),
            "schema": self.schema.model_dump(mode="json"),
            "analytical": self.config.model_dump(mode="json"),
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> AnalyticalModel:
        return cls(
            config=AnalyticalConfig.model_validate(payload["analytical"]),
            schema=DatasetSchema.model_validate(payload["schema"]),
        )
