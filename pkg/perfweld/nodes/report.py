# Report node - always the last node, reached on success and on any failure.
#
# Responsibilities:
#   1. Collect the verdict, training figures, summary, artifact paths and errors.
#   2. Write result.json into the output directory when one exists.
#
# Node contract:
#   Reads:   run_id, recipe_name, output_dir, dataset_path, model_path,
#            report_path, training, summary, verdict, errors, completed_nodes
#   Writes:  result, result_path, completed_nodes

from pathlib import Path

from perfweld.core.io import atomic_write_json
from perfweld.core.state import RecipeState
from perfweld.logging.logger import get_logger

log = get_logger(__name__)

NODE = "report"


def report_node(state: RecipeState) -> dict:
    errors = state.get("errors", [])
    verdict = state.get("verdict")
    result = {
        "run_id": state["run_id"],
        "recipe": state["recipe_name"],
        "status": "failed" if errors else "completed",
        "passed": bool(verdict and verdict["passed"]) and not errors,
        "verdict": verdict,
        "training": state.get("training"),
        "summary": state.get("summary", []),
        "artifacts": {
            "output_dir": state.get("output_dir"),
            "dataset": state.get("dataset_path"),
            "model": state.get("model_path"),
            "report": state.get("report_path"),
        },
        "completed_nodes": [*state.get("completed_nodes", []), NODE],
        "errors": errors,
    }

    result_path = None
    if state.get("output_dir"):
        try:
            result_path = str(atomic_write_json(Path(state["output_dir"]) / "result.json", result))
        except OSError as exc:
            log.error("result_write_failed", error=str(exc))

    log.info("recipe_finished", status=result["status"], passed=result["passed"], path=result_path)
    return {"result": result, "result_path": result_path, "completed_nodes": [NODE]}
