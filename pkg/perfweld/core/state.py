# State carried between the recipe pipeline nodes.
#
#   - completed_nodes and errors are written by several nodes and use
#     Annotated[list, operator.add], so LangGraph appends to them.
#   - Every other field has exactly one writer and is replaced.
#
# Datasets and models never travel through the state: nodes write them to the
# run's output directory and pass the paths along. Everything in the state is
# JSON-serializable.

import operator
from typing import Annotated, Any, TypedDict


class ErrorEntry(TypedDict):
    """
    A structured error record appended to state['errors'] by any node
    that fails.

    node:       which node produced this error
    error_type: the exception class name
    message:    human-readable description
    context:    arbitrary key-value pairs for debugging
    """
    node: str
    error_type: str
    message: str
    context: dict[str, Any]


class RecipeState(TypedDict):
    """
    The complete state that flows through the recipe graph.

    Sections:
      CONTROL  - run id, recipe name, where outputs go
      ARTIFACT - paths of files written by the nodes
      RESULTS  - report rows, summary, verdict
      ERRORS   - accumulated failures; any entry routes the graph to report
    """

    # ------------------------------------------------------------------
    # CONTROL
    # ------------------------------------------------------------------

    # Format: "pw-{uuid4}". Bound into every log line of the run.
    run_id: str

    # Name of the recipe file (without .json) in the recipe directory.
    recipe_name: str

    # Optional root for the timestamped output directory; settings.runs_dir otherwise.
    out_root: str | None

    # Worker cap for the learning curve.
    jobs: int

    # Each node appends its own name on success.
    completed_nodes: Annotated[list[str], operator.add]

    # The validated recipe (ExperimentRecipe.model_dump()), set by load_recipe.
    recipe: dict[str, Any] | None

    # ------------------------------------------------------------------
    # ARTIFACTS
    # ------------------------------------------------------------------

    output_dir: str | None
    dataset_path: str | None
    model_path: str | None
    report_path: str | None

    # ------------------------------------------------------------------
    # RESULTS
    # ------------------------------------------------------------------

    # {"model", "train_size", "train_mape", "test_mape"} of the saved bundle.
    training: dict[str, Any] | None

    # EvalReport rows as dicts, sorted by (model, fraction, seed).
    report_rows: list[dict[str, Any]]

    # summarize() output as dicts.
    summary: list[dict[str, Any]]

    # {"criterion", "passed", "advisory", "detail"}
    verdict: dict[str, Any] | None

    # Final result document and where it was written.
    result: dict[str, Any] | None
    result_path: str | None

    # ------------------------------------------------------------------
    # ERROR TRACKING
    # ------------------------------------------------------------------

    errors: Annotated[list[ErrorEntry], operator.add]


def initial_state(
    run_id: str, recipe_name: str, out_root: str | None = None, jobs: int = 1
) -> RecipeState:
    """
    Fully-initialized state with every field present.

    LangGraph raises KeyError on first access of a missing field, so every
    key is set here even when it starts empty.
    """
    return RecipeState(
        run_id=run_id,
        recipe_name=recipe_name,
        out_root=out_root,
        jobs=jobs,
        completed_nodes=[],
        recipe=None,
        output_dir=None,
        dataset_path=None,
        model_path=None,
        report_path=None,
        training=None,
        report_rows=[],
        summary=[],
        verdict=None,
        result=None,
        result_path=None,
        errors=[],
    )


def error_entry(node: str, exc: Exception) -> ErrorEntry:
    """ErrorEntry for a failed node; PerfweldError context is carried over."""
    to_dict = getattr(exc, "to_dict", None)
    if callable(to_dict):
        payload = to_dict()
        return ErrorEntry(
            node=node,
            error_type=payload["error_type"],
            message=payload["message"],
            context=payload["context"],
        )
    return ErrorEntry(node=node, error_type=type(exc).__name__, message=str(exc), context={})
