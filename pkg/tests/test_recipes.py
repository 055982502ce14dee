from pathlib import Path

import orjson
import pytest

from perfweld.core.config import get_settings
from perfweld.core.exception import RecipeError
from perfweld.core.state import initial_state
from perfweld.graph.builder import NODE_REPORT, NODE_TRAIN, build_graph
from perfweld.graph.edges import ROUTE_REPORT, continue_or_report
from perfweld.recipes.catalog import (
    PACKAGED_MACHINES,
    PACKAGED_RECIPES,
    list_recipes,
    load_recipe,
    resolve_machine,
    resolve_recipe_path,
)
from perfweld.recipes.runner import run_recipe

PACKAGED = sorted(p.stem for p in PACKAGED_RECIPES.glob("*.json"))
RUN_FILES = ("recipe.json", "dataset.csv", "model.json", "report.csv", "curve.dat", "result.json")


def _custom_dir(tmp_path, monkeypatch, recipes: dict[str, dict]):
    root = tmp_path / "recipes"
    root.mkdir()
    for stem, payload in recipes.items():
        (root / f"{stem}.json").write_bytes(orjson.dumps(payload))
    monkeypatch.setenv("PERFWELD_RECIPES_DIR", str(root))
    get_settings.cache_clear()
    return root


def _tiny_recipe(name: str, **overrides) -> dict:
    recipe = {
        "name": name,
        "source": "synthetic",
        "schema_preset": "stencil-grid",
        "oracle": {
            "base": {"kind": "stencil"},
            "features": ["I", "J", "K"],
            "grid": {"I": [8, 16], "J": [8, 16], "K": [8, 16, 24]},
        },
        "models": ["cart"],
        "fractions": [0.5],
        "seeds": 1,
        "criterion": "hybrid-not-worse",
        "criterion_args": {"hybrid": "cart", "baseline": "cart"},
    }
    recipe.update(overrides)
    return recipe


def test_packaged_recipes_listed():
    assert set(list_recipes()) == {
        "fmm", "smoke", "stencil-blocking", "stencil-gridsize", "stencil-threads",
        "stencil-window",
    }


@pytest.mark.parametrize("name", PACKAGED)
def test_packaged_recipe_loads(name):
    recipe = load_recipe(name)
    assert recipe.name == name
    assert recipe.original_range and recipe.desk_range
    if recipe.source == "synthetic":
        assert recipe.oracle.base.machine == resolve_machine(recipe.machine)
    else:
        assert recipe.advisory


def test_unknown_recipe():
    with pytest.raises(RecipeError, match="unknown recipe 'nope'"):
        resolve_recipe_path("nope")


def test_packaged_machines_resolve():
    assert resolve_machine("desk").W == 8
    assert resolve_machine(str(PACKAGED_MACHINES / "interlagos.json")).W == 8
    with pytest.raises(RecipeError, match="unknown machine"):
        resolve_machine("cray-1")


def test_custom_directory_and_name_mismatch(tmp_path, monkeypatch):
    _custom_dir(tmp_path, monkeypatch, {"tiny": _tiny_recipe("tiny"), "odd": _tiny_recipe("x")})
    assert list_recipes() == ["odd", "tiny"]
    assert load_recipe("tiny").models == ["cart"]
    with pytest.raises(RecipeError, match="declares name 'x'"):
        load_recipe("odd")


def test_invalid_recipe_rejected(tmp_path, monkeypatch):
    _custom_dir(tmp_path, monkeypatch, {"bad": _tiny_recipe("bad", fractions=[1.5])})
    with pytest.raises(RecipeError, match="invalid recipe 'bad'"):
        load_recipe("bad")


def test_smoke_run_writes_every_artifact(tmp_path):
    outcome = run_recipe("smoke", out_root=tmp_path, run_id="pw-test-00000001")
    out = Path(outcome.output_dir)
    assert out.parent == tmp_path
    assert out.name.endswith("-smoke-00000001")
    for name in RUN_FILES:
        assert (out / name).is_file(), name
    result = orjson.loads((out / "result.json").read_bytes())
    assert result["status"] == "completed"
    assert result["errors"] == []
    assert result["training"]["model"] == "hybrid-stencil"
    assert len(outcome.summary) == 4
    assert outcome.advisory is False


def test_smoke_reports_are_reproducible(tmp_path):
    first = run_recipe("smoke", out_root=tmp_path / "a")
    second = run_recipe("smoke", out_root=tmp_path / "b")
    first_csv = (tmp_path / "a").glob("*/report.csv")
    second_csv = (tmp_path / "b").glob("*/report.csv")
    assert next(first_csv).read_text() == next(second_csv).read_text()
    assert first.summary == second.summary


def test_failing_node_writes_result_and_raises(tmp_path, monkeypatch):
    broken = _tiny_recipe("broken")
    broken["oracle"]["perturbation"] = {"linear": {"t": 0.5}}
    _custom_dir(tmp_path, monkeypatch, {"broken": broken})
    with pytest.raises(RecipeError, match="failed in build_dataset") as info:
        run_recipe("broken", out_root=tmp_path / "runs")
    result_path = info.value.context["result_path"]
    result = orjson.loads(Path(result_path).read_bytes())
    assert result["status"] == "failed"
    assert result["errors"][0]["node"] == "build_dataset"
    assert result["completed_nodes"] == ["load_recipe", "report"]


def test_routing():
    route = continue_or_report(NODE_TRAIN)
    clean = initial_state(run_id="pw-x", recipe_name="smoke")
    assert route(clean) == NODE_TRAIN
    failed = {**clean, "errors": [{"node": "x", "error_type": "E", "message": "m", "context": {}}]}
    assert route(failed) == ROUTE_REPORT == NODE_REPORT


def test_graph_compiles():
    assert hasattr(build_graph(), "invoke")
