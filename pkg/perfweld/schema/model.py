
# The one prediction interface every trained or closed-form model exposes.
#
# Implementations are immutable; predict() is a pure function of the model
# state and the feature matrix, so fitted models can be shared between
# worker threads without locking.

from __future__ import annotations

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Any, Protocol, runtime_checkable

import numpy as np

from perfweld.schema.dataset import DatasetSchema


class ModelKind(StrEnum):
    ANALYTICAL_STENCIL = "analytical-stencil"
    ANALYTICAL_FMM = "analytical-fmm"
    CART = "cart"
    RANDOM_FOREST = "random-forest"
    EXTRA_TREES = "extra-trees"
    BAGGING = "bagging"
    STACKED = "stacked"
    BAGGED_HYBRID = "bagged-hybrid"


HYBRID_KINDS = frozenset({ModelKind.STACKED, ModelKind.BAGGED_HYBRID})
LEARNER_KINDS = frozenset(
    {ModelKind.CART, ModelKind.RANDOM_FOREST, ModelKind.EXTRA_TREES, ModelKind.BAGGING}
)


@runtime_checkable
class FittedModel(Protocol):
    kind: ModelKind
    schema: DatasetSchema

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Predicted seconds for each row of X (columns in schema order)."""
        ...

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready state; the bundle layer adds the format tag."""
        ...
