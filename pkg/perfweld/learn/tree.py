
# Regression trees grown by greedy binary splitting on squared error.
#
# Two split searches share one growing loop:
#   best   - every midpoint between consecutive distinct sorted values of each
#            candidate feature (CART; random forests restrict the candidates)
#   random - one uniform threshold in [min, max) per candidate feature
#            (extremely randomized trees)
# Ties go to the lowest feature index, then the lowest threshold.
#
# Trees are stored as flat arrays (sklearn-style) so prediction routes a whole
# matrix at once: x[feature] <= threshold goes left.

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from perfweld.core.exception import FitError
from perfweld.schema.dataset import Dataset

LEAF = -1

MaxFeatures = int | Literal["all"] | None


class TreeParams(BaseModel):
    """
    Growth and ensemble parameters.

    max_features None means the learner's default: every feature for CART,
    max(1, d // 3) for random forests and extra trees.
    """

    model_config = ConfigDict(frozen=True)

    max_depth: int | None = Field(default=None, gt=0)
    min_samples_leaf: int = Field(default=1, ge=1)
    n_trees: int = Field(default=100, ge=1)
    max_features: MaxFeatures = None
    seed: int = Field(default=0, ge=0)
    bootstrap: bool = True
    n_jobs: int = Field(default=1, ge=1)


def resolve_max_features(params: TreeParams, n_features: int, default_all: bool) -> int:
    mf = params.max_features
    if mf is None:
        return n_features if default_all else max(1, n_features // 3)
    if mf == "all":
        return n_features
    if not 1 <= mf <= n_features:
        raise FitError(
            f"max_features={mf} must lie in [1, {n_features}]",
            {"max_features": mf, "n_features": n_features},
        )
    return mf


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """Flat-array binary tree. feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.shape[0])

    @property
    def leaf_count(self) -> int:
        return int(np.count_nonzero(self.feature == LEAF))

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=np.intp)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depth[self.left[node]] = depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        node = np.zeros(X.shape[0], dtype=np.intp)
        while True:
            feat = self.feature[node]
            active = np.flatnonzero(feat != LEAF)
            if active.size == 0:
                return node
            current = node[active]
            go_left = X[active, feat[active]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "tree",
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> RegressionTree:
        return cls(
            feature=np.asarray(payload["feature"], dtype=np.intp),
            threshold=np.asarray(payload["threshold"], dtype=np.float64),
            left=np.asarray(payload["left"], dtype=np.intp),
            right=np.asarray(payload["right"], dtype=np.intp),
            value=np.asarray(payload["value"], dtype=np.float64),
            n_samples=np.asarray(payload["n_samples"], dtype=np.intp),
        )


# ------------------------------------------------------------------
# Split searches
# ------------------------------------------------------------------

Split = tuple[int, float, float]  # (feature, threshold, sse)


def _sse(y: np.ndarray) -> float:
    centered = y - y.mean()
    return float(centered @ centered)


def best_split(
    X: np.ndarray, y: np.ndarray, features: np.ndarray, min_samples_leaf: int
) -> Split | None:
    """Exhaustive midpoint search over `features` minimizing left + right SSE."""
    n = y.shape[0]
    sizes = np.arange(1, n)  # rows going left for a cut after sorted position i-1
    size_ok = (sizes >= min_samples_leaf) & (n - sizes >= min_samples_leaf)
    if not size_ok.any():
        return None

    best: Split | None = None
    for f in features:
        xs = X[:, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        ys = y[order] - y.mean()
        csum = np.cumsum(ys)
        csum2 = np.cumsum(ys * ys)
        left_sum, left_sq = csum[:-1], csum2[:-1]
        right_sum, right_sq = csum[-1] - left_sum, csum2[-1] - left_sq
        sse = (left_sq - left_sum**2 / sizes) + (right_sq - right_sum**2 / (n - sizes))

        valid = size_ok & (xs_sorted[1:] > xs_sorted[:-1])
        if not valid.any():
            continue
        candidates = np.flatnonzero(valid)
        pos = candidates[np.argmin(sse[candidates])]
        score = float(sse[pos])
        if best is None or score < best[2]:
            lo, hi = xs_sorted[pos], xs_sorted[pos + 1]
            threshold = lo + (hi - lo) / 2.0
            if not lo <= threshold < hi:
                threshold = lo
            best = (int(f), float(threshold), score)
    return best


def random_split(
    X: np.ndarray,
    y: np.ndarray,
    features: np.ndarray,
    min_samples_leaf: int,
    rng: np.random.Generator,
) -> Split | None:
    """One uniform threshold per candidate feature; keep the lowest-SSE candidate."""
    best: Split | None = None
    for f in features:
        xs = X[:, f]
        lo, hi = float(xs.min()), float(xs.max())
        if lo == hi:
            continue
        threshold = float(rng.uniform(lo, hi))
        mask = xs <= threshold
        n_left = int(np.count_nonzero(mask))
        if n_left < min_samples_leaf or y.shape[0] - n_left < min_samples_leaf:
            continue
        score = _sse(y[mask]) + _sse(y[~mask])
        if best is None or score < best[2]:
            best = (int(f), threshold, score)
    return best


# ------------------------------------------------------------------
# Growing
# ------------------------------------------------------------------

def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    params: TreeParams,
    *,
    splitter: Literal["best", "random"] = "best",
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
) -> RegressionTree:
    """
    Grow one tree on (X, y). Stops at max_depth, when a node cannot hold two
    leaves of min_samples_leaf rows, when the responses are all equal, or when
    no candidate split exists.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n == 0:
        raise FitError("cannot fit a tree on an empty dataset")
    k = d if max_features is None else max_features
    if (k < d or splitter == "random") and rng is None:
        raise FitError("a random generator is required for randomized splits")

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    n_samples: list[int] = []

    def new_node(idx: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        n_samples.append(int(idx.shape[0]))
        return len(feature) - 1

    all_features = np.arange(d)
    stack = [(np.arange(n), 0, new_node(np.arange(n)))]
    while stack:
        idx, depth, node = stack.pop()
        ys = y[idx]
        if (
            (params.max_depth is not None and depth >= params.max_depth)
            or idx.shape[0] < 2 * params.min_samples_leaf
            or np.all(ys == ys[0])
        ):
            continue

        if k < d:
            candidates = np.sort(rng.choice(d, size=k, replace=False))
        else:
            candidates = all_features
        Xn = X[idx]
        if splitter == "best":
            split = best_split(Xn, ys, candidates, params.min_samples_leaf)
        else:
            split = random_split(Xn, ys, candidates, params.min_samples_leaf, rng)
        if split is None:
            continue

        f, thr, _ = split
        go_left = Xn[:, f] <= thr
        left_idx, right_idx = idx[go_left], idx[~go_left]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(left_idx)
        right[node] = new_node(right_idx)
        stack.append((right_idx, depth + 1, right[node]))
        stack.append((left_idx, depth + 1, left[node]))

    return RegressionTree(
        feature=np.asarray(feature, dtype=np.intp),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.intp),
        right=np.asarray(right, dtype=np.intp),
        value=np.asarray(value, dtype=np.float64),
        n_samples=np.asarray(n_samples, dtype=np.intp),
    )


def fit_cart(train: Dataset, params: TreeParams | None = None) -> RegressionTree:
    """Deterministic CART over every feature; thresholds are raw-feature midpoints."""
    params = params or TreeParams()
    if len(train) == 0:
        raise FitError("cannot fit a tree on an empty dataset")
    max_features = resolve_max_features(params, train.schema.n_features, default_all=True)
    subsample = max_features < train.schema.n_features
    rng = np.random.default_rng([params.seed, 0]) if subsample else None
    return grow_tree(train.X, train.y, params, splitter="best", max_features=max_features, rng=rng)


def predict_tree(tree: RegressionTree, x: np.ndarray) -> float:
    return float(tree.predict(np.atleast_2d(x))[0])
