
# Synthetic ground truth: a perturbed analytical model.
#
#   response = analytical(x) * perturbation(z) * (1 + eps)
#
# z is x standardized over the point grid, perturbation is a fixed low-order
# polynomial in z floored at a positive value, and eps ~ N(0, sigma) from a
# seeded generator. The factor (1 + eps) is clamped at MIN_NOISE_FACTOR so
# every response stays strictly positive.

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from perfweld.analytical.model import AnalyticalConfig, AnalyticalModel
from perfweld.bench.runner import Axis, axis_values
from perfweld.core.exception import AnalyticalModelError, OracleError, PerfweldError
from perfweld.core.io import read_json
from perfweld.learn.standardizer import fit_standardizer_array
from perfweld.logging.logger import get_logger
from perfweld.schema.dataset import Dataset, DatasetSchema

log = get_logger(__name__)

MIN_NOISE_FACTOR = 1e-3


class Perturbation(BaseModel):
    """intercept + sum(linear[f] * z_f) + sum(quadratic[f] * z_f**2), floored at `floor`."""

    model_config = ConfigDict(frozen=True)

    intercept: float = 1.0
    linear: dict[str, float] = Field(default_factory=dict)
    quadratic: dict[str, float] = Field(default_factory=dict)
    floor: float = Field(default=0.1, gt=0.0)

    @property
    def features(self) -> set[str]:
        return set(self.linear) | set(self.quadratic)

    def evaluate(self, Z: np.ndarray, schema: DatasetSchema) -> np.ndarray:
        out = np.full(Z.shape[0], self.intercept, dtype=np.float64)
        for name, coef in self.linear.items():
            out = out + coef * Z[:, schema.index_of(name)]
        for name, coef in self.quadratic.items():
            z = Z[:, schema.index_of(name)]
            out = out + coef * z * z
        return np.maximum(out, self.floor)


class SyntheticOracleSpec(BaseModel):
    """
    Perturbed analytical oracle.

    `features` and `grid` are optional here and only needed by `synthesize`,
    which builds the point grid itself (the CLI path).
    """

    model_config = ConfigDict(frozen=True)

    base: AnalyticalConfig
    perturbation: Perturbation = Field(default_factory=Perturbation)
    sigma: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=0, ge=0)
    # Skip grid points the analytical model rejects instead of failing.
    drop_invalid: bool = False
    features: tuple[str, ...] | None = None
    response_name: str = "time_seconds"
    grid: dict[str, Axis] | None = None

    @model_validator(mode="after")
    def _check_grid(self) -> SyntheticOracleSpec:
        if self.grid is not None:
            if self.features is None:
                raise ValueError("a grid needs the feature list")
            missing = [f for f in self.features if f not in self.grid]
            if missing:
                raise ValueError(f"grid has no axis for features {missing}")
        return self


def load_oracle_spec(path: str | Path) -> SyntheticOracleSpec:
    try:
        raw = read_json(path)
    except orjson.JSONDecodeError as exc:
        raise OracleError(f"oracle spec is not valid JSON: {exc}", {"path": str(path)}) from exc
    try:
        return SyntheticOracleSpec.model_validate(raw)
    except ValidationError as exc:
        raise OracleError(f"invalid oracle spec: {exc}", {"path": str(path)}) from exc


def expand_grid(features: Sequence[str], grid: Mapping[str, Axis]) -> np.ndarray:
    """Cartesian product of the axes in feature order; the last feature varies fastest."""
    axes = [axis_values(grid[f]) for f in features]
    return np.array(list(itertools.product(*axes)), dtype=np.float64).reshape(-1, len(features))


def gen_synthetic(
    schema: DatasetSchema, points: np.ndarray, oracle: SyntheticOracleSpec
) -> Dataset:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] == 0:
        raise OracleError("no grid points to evaluate")
    if points.shape[1] != schema.n_features:
        raise OracleError(
            f"points have {points.shape[1]} columns, schema has {schema.n_features} features"
        )
    try:
        schema.require(sorted(oracle.perturbation.features), "perturbation")
        analytical = AnalyticalModel(oracle.base, schema)
    except PerfweldError as exc:
        raise OracleError(exc.message, exc.context) from exc

    base = np.empty(points.shape[0])
    keep = np.ones(points.shape[0], dtype=bool)
    for i, x in enumerate(points):
        try:
            base[i] = analytical.predict_row(x, i)
        except AnalyticalModelError as exc:
            if not oracle.drop_invalid:
                raise OracleError(
                    f"analytical model failed at point {i}: {exc.message}", exc.context
                ) from exc
            keep[i] = False

    Z = fit_standardizer_array(points).apply(points)
    factor = oracle.perturbation.evaluate(Z, schema)
    if oracle.sigma > 0.0:
        eps = np.random.default_rng(oracle.seed).normal(0.0, oracle.sigma, size=points.shape[0])
        noise = np.maximum(1.0 + eps, MIN_NOISE_FACTOR)
    else:
        noise = np.ones(points.shape[0])
    y = base * factor * noise

    if not keep.all():
        log.warning("synthetic_points_dropped", dropped=int((~keep).sum()), total=len(keep))
    if not keep.any():
        raise OracleError("the analytical model rejected every grid point")
    log.info(
        "synthetic_dataset_built",
        analytical=oracle.base.kind, points=int(keep.sum()), sigma=oracle.sigma, seed=oracle.seed,
    )
    return Dataset(schema, points[keep], y[keep])


def synthesize(oracle: SyntheticOracleSpec) -> Dataset:
    """Build the grid named in the spec and run gen_synthetic over it."""
    if oracle.features is None or oracle.grid is None:
        raise OracleError("oracle spec needs 'features' and 'grid' to synthesize a dataset")
    try:
        schema = DatasetSchema(feature_names=oracle.features, response_name=oracle.response_name)
    except ValidationError as exc:
        raise OracleError(f"invalid feature list: {exc}") from exc
    return gen_synthetic(schema, expand_grid(oracle.features, oracle.grid), oracle)
