
# Zero-mean / unit-variance feature scaling fit on the training rows.

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from perfweld.core.exception import FitError
from perfweld.schema.dataset import Dataset


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-feature mean and population std; zero std is stored as 1 so constants map to 0."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std

    def inverse(self, Z: np.ndarray) -> np.ndarray:
        return np.asarray(Z, dtype=np.float64) * self.std + self.mean

    def to_dict(self) -> dict[str, Any]:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> Standardizer:
        return cls(
            mean=np.asarray(payload["mean"], dtype=np.float64),
            std=np.asarray(payload["std"], dtype=np.float64),
        )


def fit_standardizer_array(X: np.ndarray) -> Standardizer:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise FitError("cannot fit a standardizer on an empty dataset")
    constant = np.ptp(X, axis=0) == 0.0
    mean = np.where(constant, X[0], X.mean(axis=0))
    std = np.where(constant, 1.0, X.std(axis=0))
    return Standardizer(mean=mean, std=std)


def fit_standardizer(ds: Dataset) -> Standardizer:
    return fit_standardizer_array(ds.X)
