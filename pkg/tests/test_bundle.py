import numpy as np
import orjson
import pytest

from perfweld.analytical.model import AnalyticalConfig, AnalyticalModel
from perfweld.bundle import (
    load_hybrid,
    load_model,
    model_from_bundle,
    model_to_bundle,
    save_hybrid,
    save_model,
)
from perfweld.core.config import MODEL_FORMAT_TAG
from perfweld.core.exception import KindMismatchError, ModelFormatError
from perfweld.hybrid.model import Aggregate, BagWeights, HybridConfig, HybridModel, fit_hybrid
from perfweld.learn.model import LearnerModel, fit_learner
from perfweld.learn.tree import TreeParams
from perfweld.schema.dataset import STENCIL_GRID_SCHEMA
from perfweld.schema.model import ModelKind


@pytest.fixture
def learner(smooth_ds) -> LearnerModel:
    return fit_learner(smooth_ds, ModelKind.EXTRA_TREES, TreeParams(n_trees=6, seed=1))


@pytest.fixture
def hybrid(desk, perturbed_stencil_ds) -> HybridModel:
    cfg = HybridConfig(
        analytical=AnalyticalConfig(kind="stencil", machine=desk),
        params=TreeParams(n_trees=6, max_features="all"),
        aggregate=Aggregate.BAGGED,
        bag_weights=BagWeights.VALIDATION_MAPE,
    )
    return fit_hybrid(perturbed_stencil_ds, cfg)


def test_learner_round_trip_is_bit_identical(tmp_path, learner, smooth_ds):
    path = save_model(learner, tmp_path / "learner.json")
    back = load_model(path)
    assert isinstance(back, LearnerModel)
    assert back.kind is ModelKind.EXTRA_TREES
    assert np.array_equal(back.predict(smooth_ds.X), learner.predict(smooth_ds.X))


def test_hybrid_round_trip_is_bit_identical(tmp_path, hybrid, perturbed_stencil_ds):
    save_hybrid(hybrid, tmp_path / "hybrid.json")
    back = load_hybrid(tmp_path / "hybrid.json")
    assert back.kind is ModelKind.BAGGED_HYBRID
    assert back.weights == hybrid.weights
    assert back.config.analytical.machine == hybrid.config.analytical.machine
    assert np.array_equal(
        back.predict(perturbed_stencil_ds.X), hybrid.predict(perturbed_stencil_ds.X)
    )


def test_analytical_round_trip(tmp_path, desk, exact_stencil_ds):
    model = AnalyticalModel(AnalyticalConfig(kind="stencil", machine=desk), STENCIL_GRID_SCHEMA)
    back = load_model(save_model(model, tmp_path / "analytical.json"))
    assert isinstance(back, AnalyticalModel)
    assert np.array_equal(back.predict(exact_stencil_ds.X), model.predict(exact_stencil_ds.X))


def test_bundle_carries_format_tag(learner):
    bundle = model_to_bundle(learner)
    assert bundle["format"] == MODEL_FORMAT_TAG
    assert bundle["kind"] == "extra-trees"


def test_wrong_format_tag(learner):
    bundle = model_to_bundle(learner)
    bundle["format"] = "perfweld-model/0"
    with pytest.raises(ModelFormatError, match="unsupported model format"):
        model_from_bundle(bundle)


def test_unknown_kind():
    with pytest.raises(ModelFormatError, match="unknown model kind"):
        model_from_bundle({"format": MODEL_FORMAT_TAG, "kind": "knn"})


def test_missing_key(learner):
    bundle = model_to_bundle(learner)
    del bundle["estimator"]
    with pytest.raises(ModelFormatError, match="corrupt"):
        model_from_bundle(bundle)


def test_not_an_object():
    with pytest.raises(ModelFormatError, match="JSON object"):
        model_from_bundle([1, 2, 3])


def test_invalid_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ nope")
    with pytest.raises(ModelFormatError, match="not valid JSON"):
        load_model(path)


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        load_model(tmp_path / "absent.json")


def test_load_hybrid_rejects_learner_bundle(tmp_path, learner):
    path = save_model(learner, tmp_path / "learner.json")
    with pytest.raises(KindMismatchError, match="expected a hybrid"):
        load_hybrid(path)


def test_saved_file_is_sorted_json(tmp_path, learner):
    path = save_model(learner, tmp_path / "learner.json")
    payload = orjson.loads(path.read_bytes())
    assert list(payload) == sorted(payload)
