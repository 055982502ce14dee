import numpy as np
import pytest

from perfweld.analytical.model import AnalyticalConfig, AnalyticalModel
from perfweld.core.exception import AnalyticalModelError, SchemaMismatchError
from perfweld.eval.metrics import mape
from perfweld.hybrid.model import (
    ANALYTICAL_FEATURE,
    Aggregate,
    BagWeights,
    HybridConfig,
    HybridModel,
    fit_hybrid,
    inverse_mape_weights,
    predict_hybrid,
)
from perfweld.learn.ensemble import fit_extra_trees_arrays
from perfweld.learn.tree import TreeParams
from perfweld.schema.dataset import STENCIL_BLOCKED_SCHEMA, Dataset, split_uniform
from perfweld.schema.model import ModelKind


class _LastColumn:
    """Returns the (unscaled) analytical column unchanged."""

    def predict(self, X):
        return np.asarray(X)[:, -1].copy()

    def to_dict(self):
        return {"type": "last-column"}


class _Constant:
    def __init__(self, value: float) -> None:
        self.value = value

    def predict(self, X):
        return np.full(np.asarray(X).shape[0], self.value)

    def to_dict(self):
        return {"type": "constant", "value": self.value}


def _cfg(machine, **kw) -> HybridConfig:
    return HybridConfig(analytical=AnalyticalConfig(kind="stencil", machine=machine), **kw)


def test_identity_learner_reproduces_analytical(desk, perturbed_stencil_ds):
    cfg = _cfg(desk, standardize=False)
    model = fit_hybrid(perturbed_stencil_ds, cfg, lambda X, y, kind, params: _LastColumn())
    analytical = AnalyticalModel(cfg.analytical, perturbed_stencil_ds.schema)
    assert np.array_equal(
        model.predict(perturbed_stencil_ds.X), analytical.predict(perturbed_stencil_ds.X)
    )
    assert model.kind is ModelKind.STACKED


def test_learner_sees_analytical_column(desk, exact_stencil_ds):
    seen = {}

    def factory(X, y, kind, params):
        seen["shape"] = X.shape
        seen["kind"] = kind
        return _Constant(1.0)

    model = fit_hybrid(exact_stencil_ds, _cfg(desk), factory)
    assert seen["shape"] == (len(exact_stencil_ds), 4)
    assert seen["kind"] is ModelKind.EXTRA_TREES
    assert model.augmented_schema.feature_names == ("I", "J", "K", ANALYTICAL_FEATURE)


def test_uniform_bagging_averages(desk, exact_stencil_ds):
    cfg = _cfg(desk, aggregate=Aggregate.BAGGED)
    model = fit_hybrid(exact_stencil_ds, cfg, lambda X, y, kind, params: _Constant(3.0))
    analytical = model.analytical.predict(exact_stencil_ds.X)
    assert model.kind is ModelKind.BAGGED_HYBRID
    assert model.weights == (0.5, 0.5)
    assert np.array_equal(model.predict(exact_stencil_ds.X), 0.5 * analytical + 0.5 * 3.0)


def test_bagged_with_all_weight_on_stacked_equals_stacked(desk, exact_stencil_ds):
    stacked = fit_hybrid(exact_stencil_ds, _cfg(desk, params=TreeParams(n_trees=5)))
    bagged = HybridModel(
        config=stacked.config.model_copy(update={"aggregate": Aggregate.BAGGED}),
        schema=stacked.schema,
        standardizer=stacked.standardizer,
        estimator=stacked.estimator,
        weights=(0.0, 1.0),
    )
    assert np.array_equal(bagged.predict(exact_stencil_ds.X), stacked.predict(exact_stencil_ds.X))


def test_stacked_only_ignores_bag_weights(desk, exact_stencil_ds):
    factory = lambda X, y, kind, params: _Constant(2.0)  # noqa: E731
    plain = fit_hybrid(exact_stencil_ds, _cfg(desk), factory)
    weighted = fit_hybrid(
        exact_stencil_ds, _cfg(desk, bag_weights=BagWeights.VALIDATION_MAPE), factory
    )
    assert weighted.weights == (0.5, 0.5)
    assert np.array_equal(plain.predict(exact_stencil_ds.X), weighted.predict(exact_stencil_ds.X))


def test_inverse_mape_weights():
    w_a, w_s = inverse_mape_weights(10.0, 30.0)
    assert w_a == pytest.approx(0.75)
    assert w_s == pytest.approx(0.25)
    assert inverse_mape_weights(0.0, 5.0) == (1.0, 0.0)
    assert inverse_mape_weights(5.0, 0.0) == (0.0, 1.0)
    assert inverse_mape_weights(0.0, 0.0) == (0.5, 0.5)


def test_validation_weights_are_normalized(desk, perturbed_stencil_ds):
    cfg = _cfg(
        desk,
        aggregate=Aggregate.BAGGED,
        bag_weights=BagWeights.VALIDATION_MAPE,
        params=TreeParams(n_trees=10, seed=3),
    )
    model = fit_hybrid(perturbed_stencil_ds, cfg)
    w_a, w_s = model.weights
    assert w_a >= 0.0 and w_s >= 0.0
    assert w_a + w_s == pytest.approx(1.0)


def test_cart_hybrid_fits_exact_data(desk, exact_stencil_ds):
    model = fit_hybrid(exact_stencil_ds, _cfg(desk, learner=ModelKind.CART))
    assert mape(exact_stencil_ds.y, model.predict(exact_stencil_ds.X)) == pytest.approx(
        0.0, abs=1e-9
    )


def test_hybrid_beats_pure_learner_on_exact_data(desk, exact_stencil_ds):
    hybrid_err, pure_err = [], []
    for seed in range(5):
        params = TreeParams(n_trees=50, max_features="all", seed=seed)
        train, test = split_uniform(exact_stencil_ds, 0.2, seed)
        hybrid = fit_hybrid(train, _cfg(desk, params=params))
        pure = fit_extra_trees_arrays(train.X, train.y, params)
        hybrid_err.append(mape(test.y, hybrid.predict(test.X)))
        pure_err.append(mape(test.y, pure.predict(test.X)))
    assert np.mean(hybrid_err) < np.mean(pure_err)


def test_prediction_single_row(desk, exact_stencil_ds):
    model = fit_hybrid(exact_stencil_ds, _cfg(desk, params=TreeParams(n_trees=3)))
    row = exact_stencil_ds.X[7]
    assert predict_hybrid(model, row) == model.predict(exact_stencil_ds.X[7:8])[0]


def test_non_dividing_block_names_the_row(desk):
    X = np.array([[32, 32, 32, 16, 16, 16], [32, 32, 32, 5, 16, 16]], dtype=float)
    ds = Dataset(STENCIL_BLOCKED_SCHEMA, X, np.array([1.0, 1.0]))
    with pytest.raises(AnalyticalModelError) as info:
        fit_hybrid(ds, _cfg(desk))
    assert info.value.row_index == 1


def test_fmm_hybrid_rejects_stencil_schema(desk, exact_stencil_ds):
    cfg = HybridConfig(analytical=AnalyticalConfig(kind="fmm", machine=desk))
    with pytest.raises(SchemaMismatchError, match="lacks"):
        fit_hybrid(exact_stencil_ds, cfg)


def test_learner_must_be_a_tree_kind(desk):
    with pytest.raises(ValueError, match="learner must be"):
        _cfg(desk, learner=ModelKind.STACKED)
