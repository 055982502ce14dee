
# Named model recipes for training and learning curves.
#
# A trainer turns (training rows, seed) into a FittedModel. The seed passed by
# the learning curve is the split seed, so the learner's randomness changes
# together with the sample while every model still sees the same split.
#
#   cart, rf, extra, bagging            pure tree learners
#   analytical-stencil, analytical-fmm  closed-form models (nothing to fit)
#   hybrid-stencil, hybrid-fmm          stacked hybrid (extra trees on top)
#   hybrid-*-bagged                     stacked hybrid bagged with the analytical model

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from perfweld.analytical.model import AnalyticalConfig, AnalyticalModel
from perfweld.analytical.stencil import CachePolicy
from perfweld.core.exception import ConfigurationError
from perfweld.hybrid.model import Aggregate, BagWeights, HybridConfig, fit_hybrid
from perfweld.learn.model import fit_learner
from perfweld.learn.tree import TreeParams
from perfweld.schema.dataset import Dataset
from perfweld.schema.machine import MachineSpec
from perfweld.schema.model import FittedModel, ModelKind

FitFn = Callable[[Dataset, int], FittedModel]

LEARNER_ALIASES: dict[str, ModelKind] = {
    "cart": ModelKind.CART,
    "rf": ModelKind.RANDOM_FOREST,
    "extra": ModelKind.EXTRA_TREES,
    "bagging": ModelKind.BAGGING,
}
ANALYTICAL_NAMES = {"analytical-stencil": "stencil", "analytical-fmm": "fmm"}
HYBRID_NAMES = {
    "hybrid-stencil": ("stencil", Aggregate.STACKED_ONLY),
    "hybrid-fmm": ("fmm", Aggregate.STACKED_ONLY),
    "hybrid-stencil-bagged": ("stencil", Aggregate.BAGGED),
    "hybrid-fmm-bagged": ("fmm", Aggregate.BAGGED),
}
TRAINER_NAMES = (*LEARNER_ALIASES, *ANALYTICAL_NAMES, *HYBRID_NAMES)


@dataclass(frozen=True)
class TrainerSpec:
    name: str
    fit: FitFn
    # Smallest training split the model accepts.
    min_train_rows: int = 1


def build_trainer(
    name: str,
    *,
    params: TreeParams | None = None,
    machine: MachineSpec | None = None,
    order: int = 1,
    cache_policy: CachePolicy = CachePolicy.WRITE_ALLOCATE,
    timesteps: int = 1,
    bag_weights: BagWeights = BagWeights.UNIFORM,
    standardize: bool = True,
) -> TrainerSpec:
    params = params or TreeParams()

    if name in LEARNER_ALIASES:
        kind = LEARNER_ALIASES[name]

        def fit_pure(train: Dataset, seed: int) -> FittedModel:
            return fit_learner(train, kind, params.model_copy(update={"seed": seed}), standardize)

        return TrainerSpec(name=name, fit=fit_pure, min_train_rows=2)

    if name not in ANALYTICAL_NAMES and name not in HYBRID_NAMES:
        raise ConfigurationError(
            f"unknown model '{name}'", {"known": list(TRAINER_NAMES)}
        )
    if machine is None:
        raise ConfigurationError(f"model '{name}' needs a machine spec (--spec)")

    if name in ANALYTICAL_NAMES:
        acfg = AnalyticalConfig(
            kind=ANALYTICAL_NAMES[name], machine=machine, order=order,
            cache_policy=cache_policy, timesteps=timesteps,
        )

        def fit_analytical(train: Dataset, seed: int) -> FittedModel:
            return AnalyticalModel(acfg, train.schema)

        return TrainerSpec(name=name, fit=fit_analytical, min_train_rows=1)

    family, aggregate = HYBRID_NAMES[name]
    acfg = AnalyticalConfig(
        kind=family, machine=machine, order=order, cache_policy=cache_policy, timesteps=timesteps
    )

    def fit_stacked(train: Dataset, seed: int) -> FittedModel:
        cfg = HybridConfig(
            analytical=acfg,
            learner=ModelKind.EXTRA_TREES,
            params=params.model_copy(update={"seed": seed}),
            aggregate=aggregate,
            bag_weights=bag_weights,
            standardize=standardize,
        )
        return fit_hybrid(train, cfg)

    return TrainerSpec(name=name, fit=fit_stacked, min_train_rows=2)
