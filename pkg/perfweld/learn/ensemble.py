
# Tree ensembles: bagging, random forests, extremely randomized trees.
#
# Member i draws all of its randomness (bootstrap rows, feature subsets,
# thresholds) from default_rng([seed, i]), so members can be fit on a thread
# pool and still come out bit-identical to a sequential fit. Prediction is the
# mean over members in member order.

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from perfweld.core.exception import FitError
from perfweld.learn.tree import RegressionTree, TreeParams, grow_tree, resolve_max_features
from perfweld.logging.logger import get_logger
from perfweld.schema.dataset import Dataset
from perfweld.schema.model import ModelKind

log = get_logger(__name__)

BaseLearner = Literal["cart", "extra-trees"]


@dataclass(frozen=True, eq=False)
class TreeEnsemble:
    kind: ModelKind
    members: tuple[RegressionTree, ...]

    def member_predictions(self, X: np.ndarray) -> np.ndarray:
        return np.stack([tree.predict(X) for tree in self.members])

    def predict(self, X: np.ndarray) -> np.ndarray:
        preds = self.member_predictions(X)
        # Clip keeps the mean inside the member range despite summation rounding.
        return np.clip(preds.mean(axis=0), preds.min(axis=0), preds.max(axis=0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "ensemble",
            "kind": str(self.kind),
            "members": [tree.to_dict() for tree in self.members],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> TreeEnsemble:
        return cls(
            kind=ModelKind(payload["kind"]),
            members=tuple(RegressionTree.from_dict(m) for m in payload["members"]),
        )


Estimator = RegressionTree | TreeEnsemble


def estimator_from_dict(payload: dict[str, Any]) -> Estimator:
    if payload.get("type") == "tree":
        return RegressionTree.from_dict(payload)
    if payload.get("type") == "ensemble":
        return TreeEnsemble.from_dict(payload)
    raise FitError(f"unknown estimator type {payload.get('type')!r}")


def member_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _fit_members(
    X: np.ndarray,
    y: np.ndarray,
    params: TreeParams,
    *,
    kind: ModelKind,
    splitter: Literal["best", "random"],
    max_features: int,
    bootstrap: bool,
) -> TreeEnsemble:
    n = X.shape[0]
    if n == 0:
        raise FitError("cannot fit an ensemble on an empty dataset")

    def fit_member(index: int) -> RegressionTree:
        rng = member_rng(params.seed, index)
        if bootstrap:
            rows = rng.integers(0, n, size=n)
            Xm, ym = X[rows], y[rows]
        else:
            Xm, ym = X, y
        return grow_tree(Xm, ym, params, splitter=splitter, max_features=max_features, rng=rng)

    if params.n_jobs > 1 and params.n_trees > 1:
        with ThreadPoolExecutor(max_workers=params.n_jobs) as pool:
            members = tuple(pool.map(fit_member, range(params.n_trees)))
    else:
        members = tuple(fit_member(i) for i in range(params.n_trees))

    log.debug(
        "ensemble_fit",
        kind=str(kind),
        n_trees=params.n_trees,
        rows=n,
        max_features=max_features,
        nodes=sum(m.node_count for m in members),
    )
    return TreeEnsemble(kind=kind, members=members)


# ------------------------------------------------------------------
# Array-level entry points (used by the model wrappers and the hybrid)
# ------------------------------------------------------------------

def fit_bagged_arrays(
    X: np.ndarray, y: np.ndarray, params: TreeParams, base: BaseLearner = "cart"
) -> TreeEnsemble:
    d = X.shape[1]
    if base == "cart":
        return _fit_members(
            X, y, params, kind=ModelKind.BAGGING, splitter="best",
            max_features=resolve_max_features(params, d, default_all=True),
            bootstrap=params.bootstrap,
        )
    if base == "extra-trees":
        return _fit_members(
            X, y, params, kind=ModelKind.BAGGING, splitter="random",
            max_features=resolve_max_features(params, d, default_all=False),
            bootstrap=params.bootstrap,
        )
    raise FitError(f"unknown base learner {base!r}")


def fit_random_forest_arrays(X: np.ndarray, y: np.ndarray, params: TreeParams) -> TreeEnsemble:
    return _fit_members(
        X, y, params, kind=ModelKind.RANDOM_FOREST, splitter="best",
        max_features=resolve_max_features(params, X.shape[1], default_all=False),
        bootstrap=params.bootstrap,
    )


def fit_extra_trees_arrays(X: np.ndarray, y: np.ndarray, params: TreeParams) -> TreeEnsemble:
    return _fit_members(
        X, y, params, kind=ModelKind.EXTRA_TREES, splitter="random",
        max_features=resolve_max_features(params, X.shape[1], default_all=False),
        bootstrap=False,
    )


def fit_estimator(
    X: np.ndarray, y: np.ndarray, kind: ModelKind, params: TreeParams
) -> Estimator:
    """Dispatch on learner kind. Bagging uses CART members."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] == 0:
        raise FitError("cannot fit on an empty dataset")
    if kind is ModelKind.CART:
        d = X.shape[1]
        max_features = resolve_max_features(params, d, default_all=True)
        rng = member_rng(params.seed, 0) if max_features < d else None
        return grow_tree(X, y, params, splitter="best", max_features=max_features, rng=rng)
    if kind is ModelKind.RANDOM_FOREST:
        return fit_random_forest_arrays(X, y, params)
    if kind is ModelKind.EXTRA_TREES:
        return fit_extra_trees_arrays(X, y, params)
    if kind is ModelKind.BAGGING:
        return fit_bagged_arrays(X, y, params, base="cart")
    raise FitError(f"{kind} is not a learner kind")


# ------------------------------------------------------------------
# Dataset-level entry points
# ------------------------------------------------------------------

def fit_bagged(train: Dataset, params: TreeParams, base: BaseLearner = "cart") -> TreeEnsemble:
    """Bootstrap aggregation of `base` learners; prediction is the member mean."""
    return fit_bagged_arrays(train.X, train.y, params, base)


def fit_random_forest(train: Dataset, params: TreeParams) -> TreeEnsemble:
    """Bagged CART where each split only sees a random subset of max_features features."""
    return fit_random_forest_arrays(train.X, train.y, params)


def fit_extra_trees(train: Dataset, params: TreeParams) -> TreeEnsemble:
    """Trees on the full training set with one random threshold per candidate feature."""
    return fit_extra_trees_arrays(train.X, train.y, params)
