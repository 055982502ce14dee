import csv

import orjson
import pytest
from conftest import DESK_PATH

from perfweld import cli
from perfweld.schema.dataset import STENCIL_GRID_SCHEMA, load_dataset

GRID = [8, 16, 24, 32]


@pytest.fixture
def oracle_path(tmp_path, desk_file_dict):
    path = tmp_path / "oracle.json"
    path.write_bytes(orjson.dumps({
        "base": {"kind": "stencil", "machine": desk_file_dict},
        "perturbation": {"intercept": 1.3, "linear": {"J": 0.2}},
        "sigma": 0.01,
        "seed": 2,
        "features": ["I", "J", "K"],
        "grid": {"I": GRID, "J": GRID, "K": GRID},
    }))
    return path


@pytest.fixture
def data_path(tmp_path, oracle_path):
    out = tmp_path / "stencil.csv"
    assert cli.main(["synth", "--oracle", str(oracle_path), "--out", str(out)]) == 0
    return out


def _hybrid_model(tmp_path, data_path):
    model = tmp_path / "model.json"
    code = cli.main([
        "train", "--model", "hybrid-stencil", "--data", str(data_path), "--spec", str(DESK_PATH),
        "--fraction", "0.25", "--seed", "7", "--n-trees", "5", "--out", str(model),
    ])
    assert code == 0
    return model


def test_synth_writes_dataset(data_path):
    ds = load_dataset(data_path, STENCIL_GRID_SCHEMA)
    assert len(ds) == 64


def test_recipe_list(capsys):
    assert cli.main(["recipe", "--list"]) == 0
    assert "smoke" in capsys.readouterr().out.split()


@pytest.mark.parametrize("argv", [[], ["fly"], ["bench"], ["recipe"]])
def test_usage_errors_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    assert "error:" in capsys.readouterr().err


def test_fraction_out_of_range(data_path, tmp_path, capsys):
    code = cli.main(["train", "--model", "extra", "--data", str(data_path), "--fraction", "1.5",
                     "--out", str(tmp_path / "m.json")])
    assert code == 1
    assert "fraction" in capsys.readouterr().err


def test_missing_required_option(tmp_path, capsys):
    code = cli.main(["train", "--model", "extra", "--fraction", "0.5",
                     "--out", str(tmp_path / "m.json")])
    assert code == 1
    assert "--data" in capsys.readouterr().err


def test_unknown_model_name(data_path, tmp_path, capsys):
    code = cli.main(["curve", "--data", str(data_path), "--models", "extra,knn",
                     "--fractions", "0.5", "--out", str(tmp_path / "r.csv")])
    assert code == 1
    assert "knn" in capsys.readouterr().err


def test_train_then_predict(tmp_path, data_path, capsys):
    model = _hybrid_model(tmp_path, data_path)
    assert "MAPE" in capsys.readouterr().out

    first, second = tmp_path / "p1.csv", tmp_path / "p2.csv"
    for out in (first, second):
        assert cli.main(["predict", "--model", str(model), "--data", str(data_path),
                         "--out", str(out)]) == 0
    with first.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 64
    assert list(rows[0]) == ["I", "J", "K", "time_seconds", "predicted_seconds"]
    assert all(float(r["predicted_seconds"]) > 0.0 for r in rows)
    assert first.read_text() == second.read_text()


def test_predict_needs_feature_columns(tmp_path, data_path, capsys):
    model = _hybrid_model(tmp_path, data_path)
    partial = tmp_path / "partial.csv"
    partial.write_text("I,J\n8,8\n")
    code = cli.main(["predict", "--model", str(model), "--data", str(partial),
                     "--out", str(tmp_path / "p.csv")])
    assert code == 1
    assert "K" in capsys.readouterr().err


def test_curve_report_and_config(tmp_path, data_path, capsys):
    out = tmp_path / "report.csv"
    gnuplot = tmp_path / "curve.dat"
    argv = ["curve", "--data", str(data_path), "--spec", str(DESK_PATH),
            "--models", "extra,hybrid-stencil", "--fractions", "0.1,0.2,0.3,0.5",
            "--seeds", "5", "--n-trees", "5", "--out", str(out), "--gnuplot", str(gnuplot)]
    assert cli.main(argv) == 0
    text = out.read_text()
    assert len(text.splitlines()) == 1 + 40
    assert "# model hybrid-stencil" in gnuplot.read_text()
    assert "hybrid-stencil" in capsys.readouterr().out

    assert cli.main(argv) == 0
    assert out.read_text() == text

    config = tmp_path / "curve.json"
    from_config = tmp_path / "from-config.csv"
    config.write_bytes(orjson.dumps({"curve": {
        "data": str(data_path),
        "spec": str(DESK_PATH),
        "models": ["extra", "hybrid-stencil"],
        "fractions": [0.1, 0.2, 0.3, 0.5],
        "seeds": 5,
        "n-trees": 5,
        "out": str(from_config),
    }}))
    assert cli.main(["curve", "--config", str(config)]) == 0
    assert from_config.read_text() == text


def test_command_line_overrides_config(tmp_path, data_path):
    config = tmp_path / "curve.json"
    config.write_bytes(orjson.dumps({
        "data": str(data_path), "models": "cart", "fractions": "0.5", "seeds": 2,
    }))
    out = tmp_path / "r.csv"
    assert cli.main(["curve", "--config", str(config), "--seeds", "3", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 3


def test_unknown_config_key(tmp_path, data_path, capsys):
    config = tmp_path / "bad.json"
    config.write_bytes(orjson.dumps({"colour": "blue"}))
    code = cli.main(["synth", "--config", str(config)])
    assert code == 1
    assert "unknown option 'colour'" in capsys.readouterr().err


def test_hybrid_needs_machine_spec(tmp_path, data_path, capsys):
    code = cli.main(["train", "--model", "hybrid-stencil", "--data", str(data_path),
                     "--fraction", "0.5", "--out", str(tmp_path / "m.json")])
    assert code == 1
    assert "--spec" in capsys.readouterr().err


def test_fmm_hybrid_on_stencil_data(tmp_path, data_path, capsys):
    code = cli.main(["train", "--model", "hybrid-fmm", "--data", str(data_path),
                     "--spec", str(DESK_PATH), "--fraction", "0.5", "--n-trees", "3",
                     "--out", str(tmp_path / "m.json")])
    assert code == 1
    assert "lacks" in capsys.readouterr().err


def test_missing_model_file(tmp_path, data_path, capsys):
    code = cli.main(["predict", "--model", str(tmp_path / "absent.json"),
                     "--data", str(data_path), "--out", str(tmp_path / "p.csv")])
    assert code == 1
    assert "absent.json" in capsys.readouterr().err


def test_bench_plan_errors(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    plan.write_text("{ not json")
    code = cli.main(["bench", "stencil", "--plan", str(plan), "--out", str(tmp_path / "b.csv")])
    assert code == 1
    assert "not valid JSON" in capsys.readouterr().err


def test_bench_output_directory_missing(tmp_path, monkeypatch, capsys):
    from perfweld.bench import runner

    monkeypatch.setattr(runner, "timer_floor", lambda: 0.0)
    plan = tmp_path / "plan.json"
    plan.write_bytes(orjson.dumps({"I": [8], "cubic": True, "repetitions": 1, "warmup": 0}))
    code = cli.main(["bench", "stencil", "--plan", str(plan),
                     "--out", str(tmp_path / "missing" / "b.csv")])
    assert code == 1


def test_unknown_recipe(capsys):
    assert cli.main(["recipe", "no-such-recipe"]) == 1
    assert "unknown recipe" in capsys.readouterr().err


def test_internal_error_exits_two(monkeypatch, tmp_path, capsys):
    def explode(args):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "synth", explode)
    code = cli.main(["synth", "--oracle", str(tmp_path / "o.json"), "--out", str(tmp_path / "d")])
    assert code == 2
    assert "internal" in capsys.readouterr().err
