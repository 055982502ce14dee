
# Learning curves: prediction error as a function of the training window.
#
# For every (fraction, seed) the dataset is split once; every model is fit on
# that same sample and scored by MAPE on the full complement. Cells run on a
# thread pool capped by `jobs`; rows are sorted before they reach the report,
# so the output does not depend on scheduling.

from __future__ import annotations

import io
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from perfweld.core.exception import EvaluationError, PerfweldError
from perfweld.core.io import atomic_write_text
from perfweld.eval.metrics import mape
from perfweld.eval.trainers import TrainerSpec
from perfweld.logging.logger import get_logger
from perfweld.schema.dataset import Dataset, format_float, split_uniform, train_size

log = get_logger(__name__)

REPORT_HEADER = ("model", "fraction", "seed", "train_size", "test_size", "mape")


class EvalRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: str
    fraction: float = Field(gt=0.0, lt=1.0)
    seed: int = Field(ge=0)
    train_size: int = Field(ge=1)
    test_size: int = Field(ge=1)
    mape: float = Field(ge=0.0)


class EvalReport(BaseModel):
    """MAPE per (model, training fraction, seed)."""

    model_config = ConfigDict(frozen=True)

    rows: tuple[EvalRow, ...]

    @property
    def models(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(r.model for r in self.rows))

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(sorted({r.fraction for r in self.rows}))

    def for_model(self, model: str) -> tuple[EvalRow, ...]:
        return tuple(r for r in self.rows if r.model == model)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(REPORT_HEADER) + "\n")
        for r in self.rows:
            buf.write(
                f"{r.model},{format_float(r.fraction)},{r.seed},"
                f"{r.train_size},{r.test_size},{r.mape!r}\n"
            )
        return buf.getvalue()


class SummaryRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: str
    fraction: float
    n: int
    median: float
    q1: float
    q3: float

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


# ------------------------------------------------------------------
# Experiments
# ------------------------------------------------------------------

def _check_grid(
    fractions: Sequence[float], seeds: Sequence[int], models: Sequence[TrainerSpec]
) -> None:
    if not fractions:
        raise EvaluationError("at least one training fraction is required")
    bad = [f for f in fractions if not 0.0 < f < 1.0]
    if bad:
        raise EvaluationError(f"fractions must lie in (0, 1): {bad}")
    if not seeds:
        raise EvaluationError("at least one seed is required")
    if any(s < 0 for s in seeds):
        raise EvaluationError(f"seeds must be non-negative: {list(seeds)}")
    if not models:
        raise EvaluationError("at least one model is required")
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        raise EvaluationError(f"model names must be unique: {names}")


def learning_curve(
    ds: Dataset,
    fractions: Sequence[float],
    seeds: Sequence[int],
    models: Sequence[TrainerSpec],
    jobs: int = 1,
) -> EvalReport:
    _check_grid(fractions, seeds, models)
    fractions = sorted(set(fractions))
    seeds = sorted(set(seeds))
    n = len(ds)
    for f in fractions:
        size = train_size(n, f)
        if size >= n:
            raise EvaluationError(
                f"fraction {f} leaves no test rows in a dataset of {n}", {"fraction": f}
            )
        for m in models:
            if size < m.min_train_rows:
                raise EvaluationError(
                    f"training split of {size} rows is smaller than the minimum "
                    f"{m.min_train_rows} for model '{m.name}'",
                    {"model": m.name, "fraction": f, "train_size": size},
                )

    order = {m.name: i for i, m in enumerate(models)}

    def run_split(key: tuple[float, int]) -> list[EvalRow]:
        fraction, seed = key
        train, test = split_uniform(ds, fraction, seed)
        rows = []
        for m in models:
            try:
                model = m.fit(train, seed)
                score = mape(test.y, model.predict(test.X))
            except PerfweldError as exc:
                exc.context.setdefault("model", m.name)
                exc.context.setdefault("fraction", fraction)
                exc.context.setdefault("seed", seed)
                raise
            log.debug("curve_cell_done", model=m.name, fraction=fraction, seed=seed, mape=score)
            rows.append(
                EvalRow(
                    model=m.name, fraction=fraction, seed=seed,
                    train_size=len(train), test_size=len(test), mape=score,
                )
            )
        return rows

    keys = [(f, s) for f in fractions for s in seeds]
    if jobs > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(run_split, keys))
    else:
        chunks = [run_split(k) for k in keys]

    rows = sorted(
        (r for chunk in chunks for r in chunk),
        key=lambda r: (order[r.model], r.fraction, r.seed),
    )
    log.info(
        "learning_curve_done",
        models=[m.name for m in models],
        fractions=fractions,
        seeds=len(seeds),
        rows=len(rows),
    )
    return EvalReport(rows=tuple(rows))


def summarize(report: EvalReport) -> tuple[SummaryRow, ...]:
    """Median and quartiles of MAPE per (model, fraction); models in report order."""
    if not report.rows:
        raise EvaluationError("cannot summarize an empty report")
    groups: dict[tuple[str, float], list[float]] = {}
    for r in report.rows:
        groups.setdefault((r.model, r.fraction), []).append(r.mape)
    model_order = {m: i for i, m in enumerate(report.models)}
    out = []
    for (model, fraction) in sorted(groups, key=lambda k: (model_order[k[0]], k[1])):
        values = np.asarray(groups[(model, fraction)])
        q1, median, q3 = np.percentile(values, [25.0, 50.0, 75.0])
        out.append(
            SummaryRow(
                model=model, fraction=fraction, n=int(values.size),
                median=float(median), q1=float(q1), q3=float(q3),
            )
        )
    return tuple(out)


def median_by_fraction(summary: Sequence[SummaryRow], model: str) -> dict[float, float]:
    return {s.fraction: s.median for s in summary if s.model == model}


# ------------------------------------------------------------------
# Output
# ------------------------------------------------------------------

def format_summary_table(summary: Sequence[SummaryRow]) -> str:
    width = max([len("model"), *(len(s.model) for s in summary)])
    lines = [f"{'model':<{width}}  {'fraction':>8}  {'n':>3}  {'median':>9}  {'q1':>9}  {'q3':>9}"]
    for s in summary:
        lines.append(
            f"{s.model:<{width}}  {s.fraction:>8.4g}  {s.n:>3}  "
            f"{s.median:>9.3f}  {s.q1:>9.3f}  {s.q3:>9.3f}"
        )
    return "\n".join(lines) + "\n"


def summary_to_gnuplot(summary: Sequence[SummaryRow]) -> str:
    """One data block per model (blocks separated by two blank lines, usable with `index`)."""
    blocks = []
    for model in dict.fromkeys(s.model for s in summary):
        lines = [f"# model {model}", "# fraction median q1 q3"]
        for s in summary:
            if s.model == model:
                lines.append(f"{s.fraction!r} {s.median!r} {s.q1!r} {s.q3!r}")
        blocks.append("\n".join(lines))
    return "\n\n\n".join(blocks) + "\n"


def write_report(
    report: EvalReport, path: str | Path, gnuplot_path: str | Path | None = None
) -> None:
    atomic_write_text(path, report.to_csv())
    if gnuplot_path is not None:
        atomic_write_text(gnuplot_path, summary_to_gnuplot(summarize(report)))
