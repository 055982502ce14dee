# Judge node.
#
# Responsibilities:
#   1. Rebuild the EvalReport from the state.
#   2. Evaluate the recipe's criterion on it.
#
# Node contract:
#   Reads:   recipe, report_rows
#   Writes:  verdict, completed_nodes, errors

from perfweld.core.exception import PerfweldError
from perfweld.core.state import RecipeState, error_entry
from perfweld.eval.curve import EvalReport
from perfweld.logging.logger import get_logger
from perfweld.recipes.catalog import ExperimentRecipe
from perfweld.recipes.criteria import judge

log = get_logger(__name__)

NODE = "judge"


def judge_node(state: RecipeState) -> dict:
    try:
        recipe = ExperimentRecipe.model_validate(state["recipe"])
        report = EvalReport.model_validate({"rows": state["report_rows"]})
        verdict = judge(recipe.criterion, report, recipe.criterion_args)
    except PerfweldError as exc:
        log.error("judge_failed", error=str(exc))
        return {"errors": [error_entry(NODE, exc)]}

    log.info(
        "recipe_judged",
        criterion=verdict.criterion, passed=verdict.passed, advisory=recipe.advisory,
        detail=verdict.detail,
    )
    return {
        "verdict": {**verdict.model_dump(), "advisory": recipe.advisory},
        "completed_nodes": [NODE],
    }
