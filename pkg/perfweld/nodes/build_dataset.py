# Build-dataset node.
#
# Responsibilities:
#   1. bench recipes: run the timed stencil kernel over the bench plan.
#      synthetic recipes: evaluate the perturbed analytical oracle on its grid.
#   2. Check the dataset against the recipe's schema preset.
#   3. Save it as dataset.csv in the output directory.
#
# Node contract:
#   Reads:   recipe, output_dir
#   Writes:  dataset_path, completed_nodes, errors

from pathlib import Path

from perfweld.bench.runner import run_stencil_bench
from perfweld.bench.synthetic import synthesize
from perfweld.core.exception import PerfweldError, SchemaMismatchError
from perfweld.core.state import RecipeState, error_entry
from perfweld.logging.logger import get_logger
from perfweld.recipes.catalog import ExperimentRecipe
from perfweld.schema.dataset import SCHEMA_PRESETS, Dataset, save_dataset

log = get_logger(__name__)

NODE = "build_dataset"


def _project(ds: Dataset, preset: str) -> Dataset:
    """Keep the preset's feature columns, in preset order."""
    schema = SCHEMA_PRESETS[preset]
    ds.schema.require(schema.feature_names, f"schema preset '{preset}'")
    columns = [ds.schema.index_of(n) for n in schema.feature_names]
    return Dataset(schema, ds.X[:, columns], ds.y)


def build_dataset_node(state: RecipeState) -> dict:
    try:
        recipe = ExperimentRecipe.model_validate(state["recipe"])
        if recipe.source == "bench":
            ds = run_stencil_bench(recipe.bench)
        else:
            ds = synthesize(recipe.oracle)
        ds = _project(ds, recipe.schema_preset)
        if len(ds) < 2:
            raise SchemaMismatchError(
                f"dataset has {len(ds)} rows; a learning curve needs at least 2"
            )
        path = save_dataset(ds, Path(state["output_dir"]) / "dataset.csv")
    except (PerfweldError, OSError) as exc:
        log.error("dataset_build_failed", error=str(exc))
        return {"errors": [error_entry(NODE, exc)]}

    log.info("dataset_built", rows=len(ds), features=list(ds.schema.feature_names), path=str(path))
    return {"dataset_path": str(path), "completed_nodes": [NODE]}
