
# perfweld command-line interface.
#
# Usage:
#   perfweld bench stencil --plan plan.json --out data.csv
#   perfweld train --model hybrid-stencil --data d.csv --spec m.json \
#                  --fraction 0.02 --seed 7 --out model.json
#   perfweld predict --model model.json --data new.csv --out pred.csv
#   perfweld curve --data d.csv --spec m.json --models extra,hybrid-stencil \
#                  --fractions 0.01,0.02,0.04,0.10 --seeds 5 --out report.csv
#   perfweld synth --oracle oracle.json --out data.csv
#   perfweld recipe stencil-blocking
#
# Every subcommand accepts --config FILE: a JSON object whose keys are flag
# names (dashes or underscores), optionally nested under the subcommand name.
# Values from the file become defaults; flags on the command line win.
#
# Exit codes: 0 success, 1 user/input error, 2 internal error. Errors print
# one line to stderr prefixed "error:".

from __future__ import annotations

import argparse
import io
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import orjson

from perfweld import __version__
from perfweld.analytical.stencil import CachePolicy
from perfweld.bench.runner import load_bench_plan, run_stencil_bench
from perfweld.bench.synthetic import load_oracle_spec, synthesize
from perfweld.bundle import load_model, save_model
from perfweld.core.config import get_settings
from perfweld.core.exception import ConfigurationError, PerfweldError
from perfweld.core.io import atomic_write_text, read_json
from perfweld.eval.curve import format_summary_table, learning_curve, summarize, write_report
from perfweld.eval.metrics import mape
from perfweld.eval.trainers import ANALYTICAL_NAMES, HYBRID_NAMES, TRAINER_NAMES, build_trainer
from perfweld.hybrid.model import BagWeights
from perfweld.learn.tree import TreeParams
from perfweld.logging.logger import bind_run, get_logger
from perfweld.recipes.catalog import list_recipes
from perfweld.recipes.runner import new_run_id, run_recipe
from perfweld.schema.dataset import (
    SCHEMA_PRESETS,
    Dataset,
    load_dataset,
    load_feature_table,
    read_dataset,
    save_dataset,
    split_uniform,
)
from perfweld.schema.machine import MachineSpec, load_machine_spec

log = get_logger(__name__)

PREDICTION_COLUMN = "predicted_seconds"


class UsageError(ConfigurationError):
    """Bad flags or a bad --config file."""


class PerfweldArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns the exit code."""

    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------------
# Flag value parsers
# ------------------------------------------------------------------

def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"fraction must lie in (0, 1), got {value}")
    return value


def _fractions(text: str) -> list[float]:
    return [_fraction(part) for part in text.split(",") if part.strip()]


def _names(text: str) -> list[str]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [n for n in names if n not in TRAINER_NAMES]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown models {unknown}; choose from {', '.join(TRAINER_NAMES)}"
        )
    return names


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _max_features(text: str) -> int | str:
    if text in ("all", "auto"):
        return text
    return _positive_int(text)


# ------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file of flag defaults; explicit flags override it")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model options")
    g.add_argument("--spec", type=Path, help="machine spec JSON (analytical and hybrid models)")
    g.add_argument("--schema", choices=sorted(SCHEMA_PRESETS), default=None,
                   help="require the data to follow a schema preset (default: infer from header)")
    g.add_argument("--n-trees", type=_positive_int, default=100, dest="n_trees")
    g.add_argument("--max-depth", type=_positive_int, default=None, dest="max_depth")
    g.add_argument("--min-samples-leaf", type=_positive_int, default=1, dest="min_samples_leaf")
    g.add_argument("--max-features", type=_max_features, default="auto", dest="max_features",
                   help="integer, 'all', or 'auto' (all for cart, d/3 for forests)")
    g.add_argument("--order", type=_positive_int, default=1, help="stencil order l")
    g.add_argument("--cache-policy", choices=[c.value for c in CachePolicy],
                   default=CachePolicy.WRITE_ALLOCATE.value, dest="cache_policy")
    g.add_argument("--timesteps", type=_positive_int, default=1)
    g.add_argument("--bag-weights", choices=[b.value for b in BagWeights],
                   default=BagWeights.UNIFORM.value, dest="bag_weights")
    g.add_argument("--no-standardize", action="store_false", dest="standardize")
    g.add_argument("--jobs", type=_positive_int, default=None,
                   help="worker threads (default: PERFWELD_JOBS)")


def build_parser() -> tuple[PerfweldArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = PerfweldArgumentParser(
        prog="perfweld",
        description=(
            "Analytical, tree-ensemble and hybrid performance models for stencils and FMM."
        ),
    )
    parser.add_argument("--version", action="version", version=f"perfweld {__version__}")
    sub = parser.add_subparsers(
        dest="command", metavar="COMMAND", parser_class=PerfweldArgumentParser
    )
    leaves: dict[str, argparse.ArgumentParser] = {}

    bench = sub.add_parser("bench", help="measure ground-truth timings")
    bench_sub = bench.add_subparsers(dest="bench_kind", metavar="KIND",
                                     parser_class=PerfweldArgumentParser)
    stencil = bench_sub.add_parser("stencil", help="time the naive stencil kernel over a plan")
    stencil.add_argument("--plan", type=Path, help="bench plan JSON")
    stencil.add_argument("--out", type=Path, help="dataset CSV to write")
    _add_common(stencil)
    leaves["bench"] = stencil

    train = sub.add_parser("train", help="fit a model on a uniform sample and save the bundle")
    train.add_argument("--model", choices=TRAINER_NAMES)
    train.add_argument("--data", type=Path, help="dataset CSV")
    train.add_argument("--fraction", type=_fraction, help="training fraction in (0, 1)")
    train.add_argument("--seed", type=_non_negative_int, default=0)
    train.add_argument("--out", type=Path, help="model bundle JSON to write")
    _add_model_flags(train)
    _add_common(train)
    leaves["train"] = train

    predict = sub.add_parser("predict", help="append predictions to a CSV")
    predict.add_argument("--model", type=Path, help="model bundle JSON")
    predict.add_argument("--data", type=Path, help="CSV with the model's feature columns")
    predict.add_argument("--out", type=Path, help="CSV to write")
    _add_common(predict)
    leaves["predict"] = predict

    curve = sub.add_parser("curve", help="learning curves: MAPE vs training fraction")
    curve.add_argument("--data", type=Path, help="dataset CSV")
    curve.add_argument("--models", type=_names, help="comma-separated model names")
    curve.add_argument("--fractions", type=_fractions, help="comma-separated fractions")
    curve.add_argument("--seeds", type=_positive_int, default=None,
                       help="seeds per fraction, 0..N-1 (default: PERFWELD_DEFAULT_SEEDS)")
    curve.add_argument("--out", type=Path, help="report CSV to write")
    curve.add_argument("--gnuplot", type=Path, default=None, help="also write gnuplot data here")
    _add_model_flags(curve)
    _add_common(curve)
    leaves["curve"] = curve

    synth = sub.add_parser("synth", help="generate a dataset from a synthetic oracle")
    synth.add_argument("--oracle", type=Path, help="oracle spec JSON")
    synth.add_argument("--out", type=Path, help="dataset CSV to write")
    _add_common(synth)
    leaves["synth"] = synth

    recipe = sub.add_parser("recipe", help="run a packaged reproduction recipe")
    recipe.add_argument("name", nargs="?", help="recipe name")
    recipe.add_argument("--list", action="store_true", help="list the available recipes")
    recipe.add_argument("--out-dir", type=Path, default=None, dest="out_dir",
                        help="root for the timestamped run directory (default: PERFWELD_RUNS_DIR)")
    recipe.add_argument("--jobs", type=_positive_int, default=None)
    _add_common(recipe)
    leaves["recipe"] = recipe

    return parser, leaves


REQUIRED: dict[str, tuple[str, ...]] = {
    "bench": ("plan", "out"),
    "train": ("model", "data", "fraction", "out"),
    "predict": ("model", "data", "out"),
    "curve": ("data", "models", "fractions", "out"),
    "synth": ("oracle", "out"),
}


def _config_defaults(path: Path, command: str, leaf: argparse.ArgumentParser) -> dict[str, Any]:
    try:
        raw = read_json(path)
    except orjson.JSONDecodeError as exc:
        raise UsageError(f"--config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError(f"--config {path} must hold a JSON object")
    if isinstance(raw.get(command), dict):
        raw = raw[command]

    known = set(vars(leaf.parse_args([])))
    defaults: dict[str, Any] = {}
    for key, value in raw.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest == "config":
            raise UsageError(f"--config {path}: unknown option '{key}' for {command}")
        # Values go back through the flag's own parser; lists become comma lists.
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, int | float) and not isinstance(value, bool):
            value = str(value)
        defaults[dest] = value
    return defaults


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser, leaves = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(
            "perfweld: a command is required (bench, train, predict, curve, synth, recipe)"
        )
    if args.command == "bench" and args.bench_kind is None:
        raise UsageError("perfweld bench: a kind is required (stencil)")

    leaf = leaves[args.command]
    if args.config is not None:
        leaf.set_defaults(**_config_defaults(args.config, args.command, leaf))
        args = parser.parse_args(argv)

    missing = [f"--{name.replace('_', '-')}" for name in REQUIRED.get(args.command, ())
               if getattr(args, name) is None]
    if missing:
        raise UsageError(f"perfweld {args.command}: missing required options {', '.join(missing)}")
    return args


# ------------------------------------------------------------------
# Shared helpers
# ------------------------------------------------------------------

def _load_data(path: Path, preset: str | None) -> Dataset:
    response = get_settings().response_name
    if preset is None:
        return read_dataset(path, response)
    schema = SCHEMA_PRESETS[preset].model_copy(update={"response_name": response})
    return load_dataset(path, schema)


def _tree_params(args: argparse.Namespace, seed: int) -> TreeParams:
    max_features = None if args.max_features == "auto" else args.max_features
    return TreeParams(
        n_trees=args.n_trees,
        max_depth=args.max_depth,
        min_samples_leaf=args.min_samples_leaf,
        max_features=max_features,
        seed=seed,
        n_jobs=args.jobs or get_settings().jobs,
    )


def _machine(args: argparse.Namespace, models: Sequence[str]) -> MachineSpec | None:
    needs = [m for m in models if m in ANALYTICAL_NAMES or m in HYBRID_NAMES]
    if not needs:
        return None
    if args.spec is None:
        raise UsageError(f"models {needs} need a machine spec: pass --spec")
    return load_machine_spec(args.spec)


def _trainer(args: argparse.Namespace, name: str, machine: MachineSpec | None, seed: int):
    return build_trainer(
        name,
        params=_tree_params(args, seed),
        machine=machine,
        order=args.order,
        cache_policy=CachePolicy(args.cache_policy),
        timesteps=args.timesteps,
        bag_weights=BagWeights(args.bag_weights),
        standardize=args.standardize,
    )


# ------------------------------------------------------------------
# Commands
# ------------------------------------------------------------------

def cmd_bench(args: argparse.Namespace) -> int:
    plan = load_bench_plan(args.plan)
    ds = run_stencil_bench(plan)
    save_dataset(ds, args.out)
    print(f"wrote {len(ds)} rows to {args.out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    ds = _load_data(args.data, args.schema)
    machine = _machine(args, [args.model])
    trainer = _trainer(args, args.model, machine, args.seed)
    train, test = split_uniform(ds, args.fraction, args.seed)
    if len(train) < trainer.min_train_rows:
        raise UsageError(
            f"--fraction {args.fraction} gives {len(train)} training rows; "
            f"{args.model} needs at least {trainer.min_train_rows}"
        )
    model = trainer.fit(train, args.seed)
    train_mape = mape(train.y, model.predict(train.X))
    print(f"model      {args.model} ({model.kind})")
    print(f"train rows {len(train)}  MAPE {train_mape:.3f}%")
    if len(test):
        print(f"test rows  {len(test)}  MAPE {mape(test.y, model.predict(test.X)):.3f}%")
    save_model(model, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    header, cells, X = load_feature_table(args.data, model.schema)
    predictions = model.predict(X) if len(cells) else []
    buf = io.StringIO()
    buf.write(",".join([*header, PREDICTION_COLUMN]) + "\n")
    for row, pred in zip(cells, predictions):
        buf.write(",".join([*(c.strip() for c in row), repr(float(pred))]) + "\n")
    atomic_write_text(args.out, buf.getvalue())
    print(f"wrote {len(cells)} predictions to {args.out}")
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    ds = _load_data(args.data, args.schema)
    machine = _machine(args, args.models)
    trainers = [_trainer(args, name, machine, 0) for name in args.models]
    n_seeds = args.seeds or get_settings().default_seeds
    report = learning_curve(
        ds, args.fractions, list(range(n_seeds)), trainers, jobs=args.jobs or get_settings().jobs
    )
    write_report(report, args.out, args.gnuplot)
    print(format_summary_table(summarize(report)), end="")
    print(f"wrote {len(report.rows)} rows to {args.out}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    oracle = load_oracle_spec(args.oracle)
    ds = synthesize(oracle)
    save_dataset(ds, args.out)
    print(f"wrote {len(ds)} rows to {args.out}")
    return 0


def cmd_recipe(args: argparse.Namespace) -> int:
    if args.list:
        print("\n".join(list_recipes()))
        return 0
    if args.name is None:
        raise UsageError("perfweld recipe: a recipe name is required (see --list)")
    outcome = run_recipe(args.name, out_root=args.out_dir, jobs=args.jobs)
    status = "PASS" if outcome.passed else "FAIL"
    suffix = " (advisory)" if outcome.advisory else ""
    print(f"{outcome.name}: {status}{suffix} - {outcome.detail}")
    print(f"outputs in {outcome.output_dir}")
    if not outcome.passed and not outcome.advisory:
        print(f"error: recipe {outcome.name} did not meet its criterion", file=sys.stderr)
        return 1
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "bench": cmd_bench,
    "train": cmd_train,
    "predict": cmd_predict,
    "curve": cmd_curve,
    "synth": cmd_synth,
    "recipe": cmd_recipe,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
        bind_run(new_run_id(), command=args.command)
        return COMMANDS[args.command](args)
    except PerfweldError as exc:
        log.error("command_failed", error_type=type(exc).__name__, message=exc.message,
                  context=exc.context)
        print(f"error: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        where = f": {exc.filename}" if exc.filename else ""
        print(f"error: {exc.strerror or exc}{where}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal_error")
        print(f"error: internal: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
