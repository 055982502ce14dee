
# Run a recipe end to end through the recipe graph.

from __future__ import annotations

import uuid
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict

from perfweld.core.config import get_settings
from perfweld.core.exception import RecipeError
from perfweld.core.state import initial_state
from perfweld.graph.builder import build_graph
from perfweld.logging.logger import get_logger
from perfweld.recipes.catalog import resolve_recipe_path

log = get_logger(__name__)


class RecipeOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    run_id: str
    passed: bool
    advisory: bool
    detail: str
    output_dir: str
    result_path: str | None
    summary: list[dict[str, Any]]


def new_run_id() -> str:
    return f"pw-{uuid.uuid4()}"


def run_recipe(
    name: str,
    out_root: str | Path | None = None,
    jobs: int | None = None,
    run_id: str | None = None,
) -> RecipeOutcome:
    """
    Execute the recipe pipeline. The first node error is raised as a
    RecipeError after result.json has been written.
    """
    resolve_recipe_path(name)
    state = initial_state(
        run_id=run_id or new_run_id(),
        recipe_name=name,
        out_root=str(out_root) if out_root is not None else None,
        jobs=jobs or get_settings().jobs,
    )
    log.info("recipe_started", recipe=name, run_id=state["run_id"])
    final = build_graph().invoke(state)

    if final["errors"]:
        first = final["errors"][0]
        raise RecipeError(
            f"recipe '{name}' failed in {first['node']}: {first['message']}",
            {"errors": final["errors"], "result_path": final.get("result_path")},
        )
    verdict = final["verdict"]
    return RecipeOutcome(
        name=name,
        run_id=final["run_id"],
        passed=verdict["passed"],
        advisory=verdict["advisory"],
        detail=verdict["detail"],
        output_dir=final["output_dir"],
        result_path=final.get("result_path"),
        summary=final["summary"],
    )
