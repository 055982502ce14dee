# Helpers shared by the nodes that reload the run's dataset and trainers.

from perfweld.eval.trainers import TrainerSpec, build_trainer
from perfweld.recipes.catalog import ExperimentRecipe, resolve_machine
from perfweld.schema.dataset import SCHEMA_PRESETS, Dataset, load_dataset


def recipe_dataset(recipe: ExperimentRecipe, path: str) -> Dataset:
    return load_dataset(path, SCHEMA_PRESETS[recipe.schema_preset])


def recipe_trainers(recipe: ExperimentRecipe) -> list[TrainerSpec]:
    machine = resolve_machine(recipe.machine)
    opts = recipe.analytical
    return [
        build_trainer(
            name,
            params=recipe.params,
            machine=machine,
            order=opts.order,
            cache_policy=opts.cache_policy,
            timesteps=opts.timesteps,
        )
        for name in recipe.models
    ]
