
# Hybrid analytical + machine-learning model.
#
# Training:
#   1. evaluate the analytical model on every training row
#   2. append its prediction as one extra feature, "analytical_prediction"
#   3. standardize the augmented features
#   4. fit the learner (extra trees by default) on the result
#   5. for the bagged variant also keep the analytical model plus the weights
#      used to average the analytical and stacked predictions
#
# Prediction runs the same feature path; bagged models return
#   w_analytical * analytical + w_stacked * stacked.

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Any, Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from perfweld.analytical.model import AnalyticalConfig, AnalyticalModel
from perfweld.core.exception import FitError
from perfweld.eval.metrics import mape
from perfweld.learn.ensemble import estimator_from_dict, fit_estimator
from perfweld.learn.standardizer import Standardizer, fit_standardizer_array
from perfweld.learn.tree import TreeParams
from perfweld.logging.logger import get_logger
from perfweld.schema.dataset import Dataset, DatasetSchema, split_uniform
from perfweld.schema.model import LEARNER_KINDS, ModelKind

log = get_logger(__name__)

ANALYTICAL_FEATURE = "analytical_prediction"


class Aggregate(StrEnum):
    STACKED_ONLY = "stacked-only"
    BAGGED = "bagged"


class BagWeights(StrEnum):
    UNIFORM = "uniform"
    VALIDATION_MAPE = "validation-mape"


class HybridConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    analytical: AnalyticalConfig
    learner: ModelKind = ModelKind.EXTRA_TREES
    params: TreeParams = Field(default_factory=TreeParams)
    aggregate: Aggregate = Aggregate.STACKED_ONLY
    bag_weights: BagWeights = BagWeights.UNIFORM
    standardize: bool = True
    validation_fraction: float = Field(default=0.25, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_learner(self) -> HybridConfig:
        if self.learner not in LEARNER_KINDS:
            raise ValueError(f"learner must be one of {sorted(LEARNER_KINDS)}, got {self.learner}")
        return self


class StackedEstimator(Protocol):
    def predict(self, X: np.ndarray) -> np.ndarray: ...

    def to_dict(self) -> dict[str, Any]: ...


# (X, y, kind, params) -> estimator. Replaceable so tests can inject a stub.
LearnerFactory = Callable[[np.ndarray, np.ndarray, ModelKind, TreeParams], StackedEstimator]


@dataclass(frozen=True, eq=False)
class HybridModel:
    config: HybridConfig
    schema: DatasetSchema
    standardizer: Standardizer | None
    estimator: StackedEstimator
    # (analytical, stacked); only used by the bagged variant
    weights: tuple[float, float] = (0.5, 0.5)

    @property
    def kind(self) -> ModelKind:
        if self.config.aggregate is Aggregate.BAGGED:
            return ModelKind.BAGGED_HYBRID
        return ModelKind.STACKED

    @property
    def analytical(self) -> AnalyticalModel:
        return AnalyticalModel(self.config.analytical, self.schema)

    @property
    def augmented_schema(self) -> DatasetSchema:
        return self.schema.with_feature(ANALYTICAL_FEATURE)

    def _stacked(self, X: np.ndarray, analytical: np.ndarray) -> np.ndarray:
        Xa = np.column_stack([X, analytical])
        if self.standardizer is not None:
            Xa = self.standardizer.apply(Xa)
        return self.estimator.predict(Xa)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        analytical = self.analytical.predict(X)
        stacked = self._stacked(X, analytical)
        if self.config.aggregate is Aggregate.STACKED_ONLY:
            return stacked
        w_a, w_s = self.weights
        return w_a * analytical + w_s * stacked

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": str(self.kind),
            "schema": self.schema.model_dump(mode="json"),
            "config": self.config.model_dump(mode="json"),
            "standardizer": self.standardizer.to_dict() if self.standardizer else None,
            "estimator": self.estimator.to_dict(),
            "weights": list(self.weights),
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> HybridModel:
        st = payload.get("standardizer")
        return cls(
            config=HybridConfig.model_validate(payload["config"]),
            schema=DatasetSchema.model_validate(payload["schema"]),
            standardizer=Standardizer.from_dict(st) if st else None,
            estimator=estimator_from_dict(payload["estimator"]),
            weights=tuple(float(w) for w in payload["weights"]),
        )


def _fit_stacked(
    X: np.ndarray,
    y: np.ndarray,
    analytical: np.ndarray,
    cfg: HybridConfig,
    factory: LearnerFactory,
) -> tuple[Standardizer | None, StackedEstimator]:
    Xa = np.column_stack([X, analytical])
    standardizer = fit_standardizer_array(Xa) if cfg.standardize else None
    if standardizer is not None:
        Xa = standardizer.apply(Xa)
    return standardizer, factory(Xa, y, cfg.learner, cfg.params)


def inverse_mape_weights(mape_analytical: float, mape_stacked: float) -> tuple[float, float]:
    """Weights proportional to 1/MAPE, normalized. A perfect predictor takes all the weight."""
    if mape_analytical == 0.0 and mape_stacked == 0.0:
        return 0.5, 0.5
    if mape_analytical == 0.0:
        return 1.0, 0.0
    if mape_stacked == 0.0:
        return 0.0, 1.0
    inv_a, inv_s = 1.0 / mape_analytical, 1.0 / mape_stacked
    total = inv_a + inv_s
    return inv_a / total, inv_s / total


def fit_hybrid(
    train: Dataset,
    cfg: HybridConfig,
    learner_factory: LearnerFactory = fit_estimator,
) -> HybridModel:
    if len(train) == 0:
        raise FitError("cannot fit a hybrid model on an empty dataset")

    analytical_model = AnalyticalModel(cfg.analytical, train.schema)
    analytical = analytical_model.predict(train.X)
    standardizer, estimator = _fit_stacked(train.X, train.y, analytical, cfg, learner_factory)

    weights = (0.5, 0.5)
    if cfg.aggregate is Aggregate.BAGGED and cfg.bag_weights is BagWeights.VALIDATION_MAPE:
        weights = _validation_weights(train, analytical, cfg, learner_factory)

    model = HybridModel(
        config=cfg,
        schema=train.schema,
        standardizer=standardizer,
        estimator=estimator,
        weights=weights,
    )
    log.debug(
        "hybrid_fit",
        kind=str(model.kind),
        analytical=cfg.analytical.kind,
        learner=str(cfg.learner),
        rows=len(train),
        weights=list(weights),
    )
    return model


def _validation_weights(
    train: Dataset, analytical: np.ndarray, cfg: HybridConfig, factory: LearnerFactory
) -> tuple[float, float]:
    """Hold out part of the training rows, score both predictors there, weight by 1/MAPE."""
    if len(train) < 2:
        log.warning("hybrid_validation_skipped", reason="fewer than two training rows")
        return 0.5, 0.5

    # Split on row indices so the analytical column can be sliced alongside.
    index_ds = Dataset(
        DatasetSchema(feature_names=("row",), response_name=train.schema.response_name),
        np.arange(len(train), dtype=np.float64).reshape(-1, 1),
        train.y,
    )
    fit_part, hold_part = split_uniform(index_ds, 1.0 - cfg.validation_fraction, cfg.params.seed)
    if len(hold_part) == 0:
        return 0.5, 0.5
    fit_rows = fit_part.X[:, 0].astype(np.intp)
    hold_rows = hold_part.X[:, 0].astype(np.intp)

    standardizer, estimator = _fit_stacked(
        train.X[fit_rows], train.y[fit_rows], analytical[fit_rows], cfg, factory
    )
    probe = HybridModel(
        config=cfg.model_copy(update={"aggregate": Aggregate.STACKED_ONLY}),
        schema=train.schema,
        standardizer=standardizer,
        estimator=estimator,
    )
    stacked_hold = probe._stacked(train.X[hold_rows], analytical[hold_rows])
    m_a = mape(train.y[hold_rows], analytical[hold_rows])
    m_s = mape(train.y[hold_rows], stacked_hold)
    weights = inverse_mape_weights(m_a, m_s)
    log.debug("hybrid_validation_weights", mape_analytical=m_a, mape_stacked=m_s, weights=weights)
    return weights


def predict_hybrid(model: HybridModel, x: np.ndarray) -> float:
    return float(model.predict(np.atleast_2d(x))[0])
