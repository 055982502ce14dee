
# Statistical end-to-end checks on the synthetic recipes. Each one fits
# hundreds of ensembles; run with `pytest -m slow`.

import numpy as np
import pytest

from perfweld.bench.synthetic import synthesize
from perfweld.eval.curve import learning_curve, median_by_fraction, summarize
from perfweld.eval.metrics import mape
from perfweld.eval.trainers import build_trainer
from perfweld.learn.model import fit_learner
from perfweld.learn.tree import TreeParams
from perfweld.nodes.common import recipe_trainers
from perfweld.recipes.catalog import load_recipe
from perfweld.recipes.criteria import judge
from perfweld.schema.dataset import Dataset, DatasetSchema, split_uniform
from perfweld.schema.model import ModelKind

pytestmark = pytest.mark.slow


def _recipe_curve(name: str, fractions=None):
    recipe = load_recipe(name)
    ds = synthesize(recipe.oracle)
    report = learning_curve(
        ds, fractions or recipe.fractions, recipe.seed_list, recipe_trainers(recipe), jobs=4
    )
    return recipe, ds, report


def _wavy(n: int = 400) -> Dataset:
    rng = np.random.default_rng(77)
    X = rng.uniform(0.0, 3.0, size=(n, 3))
    y = 1.0 + X[:, 0] ** 2 + np.cos(2.0 * X[:, 1]) + X[:, 2] + 0.5 * X[:, 0] * X[:, 2]
    return Dataset(DatasetSchema(feature_names=("a", "b", "c")), X, y)


def test_hybrid_cuts_the_error_at_a_two_percent_window(desk):
    recipe, ds, report = _recipe_curve("stencil-blocking", fractions=[0.02])
    analytical = build_trainer("analytical-stencil", machine=desk).fit(ds, 0)
    analytical_error = mape(ds.y, analytical.predict(ds.X))
    assert analytical_error > 20.0

    verdict = judge(recipe.criterion, report, recipe.criterion_args)
    assert verdict.passed, verdict.detail


def test_hybrid_needs_a_smaller_window():
    recipe, _, report = _recipe_curve("stencil-window")
    verdict = judge(recipe.criterion, report, recipe.criterion_args)
    assert verdict.passed, verdict.detail

    summary = summarize(report)
    hybrid = median_by_fraction(summary, "hybrid-stencil")
    extra = median_by_fraction(summary, "extra")
    assert min(hybrid[f] for f in hybrid if f <= 0.04) <= 10.0
    assert all(extra[f] > 10.0 for f in extra if f < 0.1)


def test_fmm_hybrid_never_worse_than_extra_trees():
    recipe, _, report = _recipe_curve("fmm")
    verdict = judge(recipe.criterion, report, recipe.criterion_args)
    assert verdict.passed, verdict.detail


def test_ensemble_reduces_seed_variance():
    train, test = split_uniform(_wavy(), 0.3, 0)
    points = test.X[:50]
    spread = {}
    for n_trees in (1, 100):
        predictions = np.stack([
            fit_learner(
                train, ModelKind.EXTRA_TREES, TreeParams(n_trees=n_trees, seed=s)
            ).predict(points)
            for s in range(20)
        ])
        spread[n_trees] = float(predictions.std(axis=0).mean())
    assert spread[1] > 0.0
    assert spread[100] < 0.5 * spread[1]


def test_cart_error_shrinks_with_more_data():
    report = learning_curve(_wavy(), [0.05, 0.1, 0.2, 0.4], range(15), [build_trainer("cart")])
    medians = median_by_fraction(summarize(report), "cart")
    ordered = [medians[f] for f in sorted(medians)]
    assert all(a >= b for a, b in zip(ordered, ordered[1:]))
