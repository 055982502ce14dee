# Train node.
#
# Responsibilities:
#   1. Pick the recipe's first hybrid model (first model if none is hybrid).
#   2. Fit it on a uniform sample at the smallest training fraction, seed 0.
#   3. Save the bundle as model.json and record train/test MAPE.
#
# Node contract:
#   Reads:   recipe, dataset_path, output_dir
#   Writes:  model_path, training, completed_nodes, errors

from pathlib import Path

from perfweld.bundle import save_model
from perfweld.core.exception import PerfweldError
from perfweld.core.state import RecipeState, error_entry
from perfweld.eval.metrics import mape
from perfweld.logging.logger import get_logger
from perfweld.nodes.common import recipe_dataset, recipe_trainers
from perfweld.recipes.catalog import ExperimentRecipe
from perfweld.schema.dataset import split_uniform

log = get_logger(__name__)

NODE = "train"


def train_node(state: RecipeState) -> dict:
    try:
        recipe = ExperimentRecipe.model_validate(state["recipe"])
        ds = recipe_dataset(recipe, state["dataset_path"])
        trainers = recipe_trainers(recipe)
        trainer = next((t for t in trainers if t.name.startswith("hybrid")), trainers[0])
        fraction = min(recipe.fractions)
        train, test = split_uniform(ds, fraction, 0)
        model = trainer.fit(train, 0)
        training = {
            "model": trainer.name,
            "fraction": fraction,
            "train_size": len(train),
            "train_mape": mape(train.y, model.predict(train.X)),
            "test_mape": mape(test.y, model.predict(test.X)),
        }
        path = save_model(model, Path(state["output_dir"]) / "model.json")
    except (PerfweldError, OSError) as exc:
        log.error("train_failed", error=str(exc))
        return {"errors": [error_entry(NODE, exc)]}

    log.info("train_done", **training)
    return {"model_path": str(path), "training": training, "completed_nodes": [NODE]}
