
# Pure machine-learning predictors behind the FittedModel interface:
# standardize the features, then apply a tree or tree ensemble.

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from perfweld.core.exception import FitError
from perfweld.learn.ensemble import Estimator, estimator_from_dict, fit_estimator
from perfweld.learn.standardizer import Standardizer, fit_standardizer_array
from perfweld.learn.tree import TreeParams
from perfweld.schema.dataset import Dataset, DatasetSchema
from perfweld.schema.model import LEARNER_KINDS, ModelKind


@dataclass(frozen=True, eq=False)
class LearnerModel:
    kind: ModelKind
    schema: DatasetSchema
    params: TreeParams
    standardizer: Standardizer | None
    estimator: Estimator

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.standardizer is not None:
            X = self.standardizer.apply(X)
        return self.estimator.predict(X)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": str(self.kind),
            "schema": self.schema.model_dump(mode="json"),
            "params": self.params.model_dump(mode="json"),
            "standardizer": self.standardizer.to_dict() if self.standardizer else None,
            "estimator": self.estimator.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> LearnerModel:
        st = payload.get("standardizer")
        return cls(
            kind=ModelKind(payload["kind"]),
            schema=DatasetSchema.model_validate(payload["schema"]),
            params=TreeParams.model_validate(payload["params"]),
            standardizer=Standardizer.from_dict(st) if st else None,
            estimator=estimator_from_dict(payload["estimator"]),
        )


def fit_learner(
    train: Dataset, kind: ModelKind, params: TreeParams, standardize: bool = True
) -> LearnerModel:
    if kind not in LEARNER_KINDS:
        raise FitError(f"{kind} is not a learner kind", {"allowed": sorted(LEARNER_KINDS)})
    if len(train) == 0:
        raise FitError("cannot fit on an empty dataset")
    standardizer = fit_standardizer_array(train.X) if standardize else None
    X = standardizer.apply(train.X) if standardizer else train.X
    return LearnerModel(
        kind=kind,
        schema=train.schema,
        params=params,
        standardizer=standardizer,
        estimator=fit_estimator(X, train.y, kind, params),
    )
