# Load-recipe node - the graph entry point.
#
# Responsibilities:
#   1. Resolve the recipe by name and validate it.
#   2. Create the timestamped output directory for this run.
#   3. Write the validated recipe next to the outputs so the run is self-describing.
#
# Node contract:
#   Reads:   recipe_name, out_root, run_id
#   Writes:  recipe, output_dir, completed_nodes, errors

from datetime import datetime, timezone
from pathlib import Path

from perfweld.core.config import get_settings
from perfweld.core.exception import PerfweldError
from perfweld.core.io import atomic_write_json
from perfweld.core.state import RecipeState, error_entry
from perfweld.logging.logger import get_logger
from perfweld.recipes.catalog import load_recipe

log = get_logger(__name__)

NODE = "load_recipe"


def load_recipe_node(state: RecipeState) -> dict:
    name = state["recipe_name"]
    try:
        recipe = load_recipe(name)
        root = Path(state.get("out_root") or get_settings().runs_dir)
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
        output_dir = root / f"{stamp}-{name}-{state['run_id'][-8:]}"
        output_dir.mkdir(parents=True, exist_ok=False)
        payload = recipe.model_dump(mode="json")
        atomic_write_json(output_dir / "recipe.json", payload)
    except (PerfweldError, OSError) as exc:
        log.error("recipe_load_failed", recipe=name, error=str(exc))
        return {"errors": [error_entry(NODE, exc)]}

    log.info("recipe_loaded", recipe=name, source=recipe.source, output_dir=str(output_dir))
    return {
        "recipe": payload,
        "output_dir": str(output_dir),
        "completed_nodes": [NODE],
    }
