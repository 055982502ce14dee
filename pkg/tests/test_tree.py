import numpy as np
import pytest

from perfweld.core.exception import FitError
from perfweld.learn.tree import (
    LEAF,
    RegressionTree,
    TreeParams,
    fit_cart,
    predict_tree,
    resolve_max_features,
)
from perfweld.schema.dataset import Dataset, DatasetSchema

SCHEMA_1D = DatasetSchema(feature_names=("x",))
SCHEMA_3D = DatasetSchema(feature_names=("a", "b", "c"))


def _ds(X, y, schema=None) -> Dataset:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    schema = schema or (SCHEMA_1D if X.shape[1] == 1 else SCHEMA_3D)
    return Dataset(schema, X, np.asarray(y, dtype=float))


def _random_ds(seed: int, n: int = 40, d: int = 3) -> Dataset:
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 10.0, size=(n, d))
    y = 1.0 + X[:, 0] + np.sin(X[:, -1]) + rng.uniform(0.0, 0.5, size=n)
    if d == 3:
        return _ds(X, y)
    return _ds(X, y, DatasetSchema(feature_names=tuple(f"x{i}" for i in range(d))))


def _sse(y: np.ndarray) -> float:
    return float(((y - y.mean()) ** 2).sum()) if y.size else 0.0


def _exhaustive_stump_sse(X: np.ndarray, y: np.ndarray) -> float:
    best = _sse(y)
    for f in range(X.shape[1]):
        values = np.unique(X[:, f])
        for lo, hi in zip(values[:-1], values[1:]):
            mask = X[:, f] <= (lo + hi) / 2
            best = min(best, _sse(y[mask]) + _sse(y[~mask]))
    return best


def test_single_split_example():
    tree = fit_cart(_ds([1.0, 2.0, 3.0], [1.0, 5.0, 5.0]), TreeParams(max_depth=1))
    assert tree.feature[0] == 0
    assert tree.threshold[0] == 1.5
    assert tree.predict(np.array([[1.0], [2.0], [3.0]])).tolist() == [1.0, 5.0, 5.0]
    assert tree.leaf_count == 2


def test_constant_response_is_one_leaf():
    tree = fit_cart(_ds([1.0, 2.0, 3.0, 4.0], [2.0] * 4))
    assert tree.node_count == 1
    assert tree.feature[0] == LEAF
    assert predict_tree(tree, np.array([100.0])) == 2.0


@pytest.mark.parametrize("n, d", [(5, 1), (12, 2), (25, 3), (60, 4), (100, 1), (100, 4)])
@pytest.mark.parametrize("seed", range(10))
def test_stump_matches_exhaustive_search(seed, n, d):
    ds = _random_ds(seed, n=n, d=d)
    tree = fit_cart(ds, TreeParams(max_depth=1))
    leaves = tree.apply(ds.X)
    chosen = sum(_sse(ds.y[leaves == leaf]) for leaf in np.unique(leaves))
    assert chosen == _exhaustive_stump_sse(ds.X, ds.y)


def test_unlimited_depth_interpolates_training_rows():
    ds = _random_ds(3, n=60)
    tree = fit_cart(ds)
    assert np.array_equal(tree.predict(ds.X), ds.y)
    assert np.all(tree.n_samples[tree.feature == LEAF] == 1)


def test_max_depth_respected():
    tree = fit_cart(_random_ds(4, n=200), TreeParams(max_depth=3))
    assert tree.depth <= 3
    assert tree.leaf_count <= 8


def test_min_samples_leaf_respected():
    tree = fit_cart(_random_ds(5, n=200), TreeParams(min_samples_leaf=7))
    assert tree.n_samples[tree.feature == LEAF].min() >= 7


def test_predictions_within_response_range():
    ds = _random_ds(6)
    tree = fit_cart(ds, TreeParams(max_depth=4))
    probe = np.random.default_rng(0).uniform(-50.0, 50.0, size=(500, 3))
    pred = tree.predict(probe)
    assert pred.min() >= ds.y.min()
    assert pred.max() <= ds.y.max()


def test_feature_subsampling_is_seeded():
    ds = _random_ds(7, n=80)
    a = fit_cart(ds, TreeParams(max_features=1, seed=3))
    b = fit_cart(ds, TreeParams(max_features=1, seed=3))
    assert a.to_dict() == b.to_dict()


def test_empty_dataset_rejected():
    empty = Dataset(SCHEMA_1D, np.empty((0, 1)), np.empty(0))
    with pytest.raises(FitError, match="empty"):
        fit_cart(empty)


def test_max_features_bounds():
    assert resolve_max_features(TreeParams(), 9, default_all=True) == 9
    assert resolve_max_features(TreeParams(), 9, default_all=False) == 3
    assert resolve_max_features(TreeParams(), 2, default_all=False) == 1
    assert resolve_max_features(TreeParams(max_features="all"), 4, default_all=False) == 4
    with pytest.raises(FitError, match="max_features"):
        resolve_max_features(TreeParams(max_features=5), 4, default_all=True)


def test_dict_round_trip_preserves_predictions():
    ds = _random_ds(8)
    tree = fit_cart(ds, TreeParams(max_depth=5))
    back = RegressionTree.from_dict(tree.to_dict())
    assert np.array_equal(back.predict(ds.X), tree.predict(ds.X))
