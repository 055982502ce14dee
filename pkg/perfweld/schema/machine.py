
# Machine description consumed by every analytical model.
#
# The on-disk format counts cache sizes in bytes; MachineSpec stores them in
# elements because the stencil and FMM equations reason in elements and
# cachelines. element_bytes is kept so a spec can be written back unchanged.
#
# File format (JSON, cache levels ordered L1 outward):
#   {"element_bytes": 8, "W": 8, "t_c": 2.5e-10, "beta_mem": 5e-10,
#    "cache_levels": [{"size_bytes": 32768, "beta": 5e-11}, ...]}

from __future__ import annotations

from pathlib import Path
from typing import Any

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from perfweld.core.exception import MachineSpecError


class CacheLevel(BaseModel):
    """One cache level: capacity in elements, inverse bandwidth from the next level."""

    model_config = ConfigDict(frozen=True)

    size_elements: int = Field(gt=0)
    beta: float = Field(gt=0)


class MachineSpec(BaseModel):
    """
    Cache hierarchy, line width, bandwidths and flop time.

    W:         elements per cacheline
    t_c:       seconds per floating-point operation
    beta_mem:  seconds per element moved from main memory
    """

    model_config = ConfigDict(frozen=True)

    cache_levels: tuple[CacheLevel, ...]
    beta_mem: float = Field(gt=0)
    t_c: float = Field(gt=0)
    W: int = Field(ge=1)
    element_bytes: int = Field(default=8, ge=1)

    @model_validator(mode="after")
    def _check_hierarchy(self) -> MachineSpec:
        if not self.cache_levels:
            raise ValueError("cache_levels must not be empty")
        previous = 0
        for level in self.cache_levels:
            if level.size_elements < self.W:
                raise ValueError("cache level must hold at least one cacheline (size >= W)")
            if level.size_elements <= previous:
                raise ValueError("cache sizes must increase from L1 outward")
            previous = level.size_elements
        return self

    @property
    def last_level(self) -> CacheLevel:
        return self.cache_levels[-1]

    def scaled(self, factor: float) -> MachineSpec:
        """Same hierarchy with every time constant multiplied by `factor`."""
        return self.model_copy(
            update={
                "t_c": self.t_c * factor,
                "beta_mem": self.beta_mem * factor,
                "cache_levels": tuple(
                    lvl.model_copy(update={"beta": lvl.beta * factor})
                    for lvl in self.cache_levels
                ),
            }
        )

    # ------------------------------------------------------------------
    # File format conversion
    # ------------------------------------------------------------------

    def to_file_dict(self) -> dict[str, Any]:
        return {
            "element_bytes": self.element_bytes,
            "W": self.W,
            "t_c": self.t_c,
            "beta_mem": self.beta_mem,
            "cache_levels": [
                {"size_bytes": lvl.size_elements * self.element_bytes, "beta": lvl.beta}
                for lvl in self.cache_levels
            ],
        }

    @classmethod
    def from_file_dict(cls, raw: Any) -> MachineSpec:
        """Validate the external JSON shape and convert byte sizes to elements."""
        if not isinstance(raw, dict):
            raise MachineSpecError("machine spec must be a JSON object")

        for name in ("element_bytes", "W", "t_c", "beta_mem", "cache_levels"):
            if name not in raw:
                raise MachineSpecError(f"missing field: {name}", field=name)

        element_bytes = raw["element_bytes"]
        if not isinstance(element_bytes, int) or element_bytes <= 0:
            raise MachineSpecError(
                "element_bytes must be a positive integer", field="element_bytes"
            )
        for name in ("t_c", "beta_mem"):
            value = raw[name]
            if not isinstance(value, (int, float)) or value <= 0:
                raise MachineSpecError(f"{name} must be positive", field=name)
        if not isinstance(raw["W"], int) or raw["W"] < 1:
            raise MachineSpecError("W must be a positive integer", field="W")

        levels_raw = raw["cache_levels"]
        if not isinstance(levels_raw, list) or not levels_raw:
            raise MachineSpecError("cache_levels must be a nonempty list", field="cache_levels")

        levels = []
        previous = 0
        for i, entry in enumerate(levels_raw):
            where = f"cache_levels[{i}]"
            if not isinstance(entry, dict):
                raise MachineSpecError(f"{where} must be an object", field=where)
            for name in ("size_bytes", "beta"):
                if name not in entry:
                    raise MachineSpecError(
                        f"missing field: {where}.{name}", field=f"{where}.{name}"
                    )
            size_bytes, beta = entry["size_bytes"], entry["beta"]
            if not isinstance(size_bytes, int) or size_bytes <= 0:
                raise MachineSpecError(
                    f"{where}.size_bytes must be a positive integer", field=f"{where}.size_bytes"
                )
            if not isinstance(beta, (int, float)) or beta <= 0:
                raise MachineSpecError(f"{where}.beta must be positive", field=f"{where}.beta")
            size_elements = size_bytes // element_bytes
            if size_elements <= previous:
                raise MachineSpecError("cache sizes must increase", field=f"{where}.size_bytes")
            if size_elements < raw["W"]:
                raise MachineSpecError(
                    f"{where} is smaller than one cacheline", field=f"{where}.size_bytes"
                )
            previous = size_elements
            levels.append(CacheLevel(size_elements=size_elements, beta=float(beta)))

        try:
            return cls(
                cache_levels=tuple(levels),
                beta_mem=float(raw["beta_mem"]),
                t_c=float(raw["t_c"]),
                W=raw["W"],
                element_bytes=element_bytes,
            )
        except ValidationError as exc:
            first = exc.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or None
            raise MachineSpecError(f"invalid machine spec: {first['msg']}", field=field) from exc


def load_machine_spec(path: str | Path) -> MachineSpec:
    """Read and validate a machine spec JSON file."""
    p = Path(path)
    try:
        raw = orjson.loads(p.read_bytes())
    except FileNotFoundError as exc:
        raise MachineSpecError(f"machine spec not found: {p}", context={"path": str(p)}) from exc
    except orjson.JSONDecodeError as exc:
        raise MachineSpecError(
            f"machine spec is not valid JSON: {exc}", context={"path": str(p)}
        ) from exc
    return MachineSpec.from_file_dict(raw)
