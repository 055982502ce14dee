# Curve node.
#
# Responsibilities:
#   1. Run the learning curve over the recipe's models, fractions and seeds.
#   2. Write report.csv and the gnuplot data file curve.dat.
#   3. Put the report rows and their summary into the state.
#
# Node contract:
#   Reads:   recipe, dataset_path, output_dir, jobs
#   Writes:  report_path, report_rows, summary, completed_nodes, errors

from pathlib import Path

from perfweld.core.exception import PerfweldError
from perfweld.core.state import RecipeState, error_entry
from perfweld.eval.curve import learning_curve, summarize, write_report
from perfweld.logging.logger import get_logger
from perfweld.nodes.common import recipe_dataset, recipe_trainers
from perfweld.recipes.catalog import ExperimentRecipe

log = get_logger(__name__)

NODE = "curve"


def curve_node(state: RecipeState) -> dict:
    try:
        recipe = ExperimentRecipe.model_validate(state["recipe"])
        ds = recipe_dataset(recipe, state["dataset_path"])
        report = learning_curve(
            ds,
            recipe.fractions,
            recipe.seed_list,
            recipe_trainers(recipe),
            jobs=state.get("jobs", 1),
        )
        out = Path(state["output_dir"])
        write_report(report, out / "report.csv", out / "curve.dat")
        summary = summarize(report)
    except (PerfweldError, OSError) as exc:
        log.error("curve_failed", error=str(exc))
        return {"errors": [error_entry(NODE, exc)]}

    return {
        "report_path": str(out / "report.csv"),
        "report_rows": [r.model_dump() for r in report.rows],
        "summary": [s.model_dump() for s in summary],
        "completed_nodes": [NODE],
    }
