
# Experiment recipes: versioned JSON files describing one reproduction run.
#
# Lookup order: settings.recipes_dir if set, else the packaged directory
# perfweld/data/recipes/v1. Machines are referenced by name and resolved from
# perfweld/data/machines, or given as a path to a machine spec file.
#
# A recipe with a synthetic source may leave the oracle's analytical machine
# out; the recipe's machine is filled in before validation.

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from perfweld.analytical.stencil import CachePolicy
from perfweld.bench.runner import BenchPlan
from perfweld.bench.synthetic import SyntheticOracleSpec
from perfweld.core.config import get_settings
from perfweld.core.exception import PerfweldError, RecipeError
from perfweld.core.io import read_json
from perfweld.learn.tree import TreeParams
from perfweld.recipes.criteria import CRITERIA
from perfweld.schema.dataset import SCHEMA_PRESETS
from perfweld.schema.machine import MachineSpec, load_machine_spec

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
PACKAGED_RECIPES = DATA_DIR / "recipes" / "v1"
PACKAGED_MACHINES = DATA_DIR / "machines"


class AnalyticalOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: int = Field(default=1, gt=0)
    cache_policy: CachePolicy = CachePolicy.WRITE_ALLOCATE
    timesteps: int = Field(default=1, gt=0)


class ExperimentRecipe(BaseModel):
    """One experiment: data source, models, training windows, and its pass criterion."""

    model_config = ConfigDict(frozen=True)

    name: str
    description: str = ""
    # Grid ranges of the original experiment next to the desk-scale ones used here.
    original_range: str = ""
    desk_range: str = ""

    source: Literal["bench", "synthetic"]
    # Schema preset the dataset follows (see SCHEMA_PRESETS).
    schema_preset: str
    bench: BenchPlan | None = None
    oracle: SyntheticOracleSpec | None = None
    machine: str = "desk"

    models: list[str] = Field(min_length=1)
    params: TreeParams = Field(default_factory=TreeParams)
    analytical: AnalyticalOptions = Field(default_factory=AnalyticalOptions)
    fractions: list[float] = Field(min_length=1)
    seeds: int = Field(default=5, ge=1)

    criterion: str
    criterion_args: dict[str, Any] = Field(default_factory=dict)
    # Advisory recipes report pass/fail but measure real hardware, so nobody gates on them.
    advisory: bool = False

    @model_validator(mode="after")
    def _check(self) -> ExperimentRecipe:
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion '{self.criterion}', known: {sorted(CRITERIA)}")
        if self.schema_preset not in SCHEMA_PRESETS:
            raise ValueError(f"unknown schema preset '{self.schema_preset}'")
        if self.source == "bench" and self.bench is None:
            raise ValueError("a bench recipe needs a 'bench' plan")
        if self.source == "synthetic" and self.oracle is None:
            raise ValueError("a synthetic recipe needs an 'oracle' spec")
        if any(not 0.0 < f < 1.0 for f in self.fractions):
            raise ValueError(f"fractions must lie in (0, 1): {self.fractions}")
        return self

    @property
    def seed_list(self) -> list[int]:
        return list(range(self.seeds))


def recipes_dir() -> Path:
    override = get_settings().recipes_dir
    return Path(override) if override is not None else PACKAGED_RECIPES


def list_recipes() -> list[str]:
    return sorted(p.stem for p in recipes_dir().glob("*.json"))


def resolve_recipe_path(name: str) -> Path:
    path = recipes_dir() / f"{name}.json"
    if not path.is_file():
        raise RecipeError(f"unknown recipe '{name}'", {"known": list_recipes()})
    return path


def machine_spec_path(machine: str) -> Path:
    """A packaged machine name ("desk") or a path to a spec file."""
    packaged = PACKAGED_MACHINES / f"{machine}.json"
    if packaged.is_file():
        return packaged
    path = Path(machine)
    if path.is_file():
        return path
    raise RecipeError(
        f"unknown machine '{machine}'",
        {"packaged": sorted(p.stem for p in PACKAGED_MACHINES.glob("*.json"))},
    )


def resolve_machine(machine: str) -> MachineSpec:
    return load_machine_spec(machine_spec_path(machine))


def load_recipe(name: str) -> ExperimentRecipe:
    path = resolve_recipe_path(name)
    try:
        raw = read_json(path)
    except orjson.JSONDecodeError as exc:
        raise RecipeError(f"recipe '{name}' is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise RecipeError(f"recipe '{name}' must be a JSON object")

    oracle = raw.get("oracle")
    if isinstance(oracle, dict) and isinstance(oracle.get("base"), dict):
        if "machine" not in oracle["base"]:
            try:
                machine = resolve_machine(raw.get("machine", "desk"))
            except PerfweldError as exc:
                raise RecipeError(f"recipe '{name}': {exc.message}", exc.context) from exc
            oracle["base"]["machine"] = machine.to_file_dict()

    try:
        recipe = ExperimentRecipe.model_validate(raw)
    except ValidationError as exc:
        raise RecipeError(f"invalid recipe '{name}': {exc}", {"path": str(path)}) from exc
    if recipe.name != name:
        raise RecipeError(
            f"recipe file '{name}' declares name '{recipe.name}'", {"path": str(path)}
        )
    return recipe
