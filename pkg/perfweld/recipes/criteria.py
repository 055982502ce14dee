
# Pass/fail criteria for recipes. Each criterion is a pure function of the
# learning-curve report and the recipe's criterion_args; all comparisons use
# the per-(model, fraction) median MAPE over seeds.

from __future__ import annotations

from collections.abc import Callable
from typing import Any

from pydantic import BaseModel, ConfigDict

from perfweld.core.exception import RecipeError
from perfweld.eval.curve import EvalReport, median_by_fraction, summarize


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    criterion: str
    passed: bool
    detail: str


Criterion = Callable[[EvalReport, dict[str, Any]], Verdict]


def _medians(report: EvalReport, model: str) -> dict[float, float]:
    medians = median_by_fraction(summarize(report), model)
    if not medians:
        raise RecipeError(
            f"report has no rows for model '{model}'", {"models": list(report.models)}
        )
    return medians


def _at(medians: dict[float, float], fraction: float, model: str) -> float:
    for f, m in medians.items():
        if abs(f - fraction) < 1e-12:
            return m
    raise RecipeError(f"report has no fraction {fraction} for model '{model}'")


def hybrid_halves_error(report: EvalReport, args: dict[str, Any]) -> Verdict:
    """hybrid median <= ratio * baseline median at one training fraction."""
    hybrid, baseline = args.get("hybrid", "hybrid-stencil"), args.get("baseline", "extra")
    fraction, ratio = float(args.get("fraction", 0.02)), float(args.get("ratio", 0.75))
    h = _at(_medians(report, hybrid), fraction, hybrid)
    b = _at(_medians(report, baseline), fraction, baseline)
    return Verdict(
        criterion="hybrid-halves-error",
        passed=h <= ratio * b,
        detail=f"at fraction {fraction}: {hybrid} {h:.3f}% vs {ratio} x {baseline} {b:.3f}%",
    )


def hybrid_small_window(report: EvalReport, args: dict[str, Any]) -> Verdict:
    """
    hybrid reaches median <= threshold at some fraction <= small_max, while the
    baseline stays above threshold at every fraction below large_min.
    """
    hybrid, baseline = args.get("hybrid", "hybrid-stencil"), args.get("baseline", "extra")
    threshold = float(args.get("threshold", 10.0))
    small_max = float(args.get("small_max", 0.04))
    large_min = float(args.get("large_min", 0.10))
    h, b = _medians(report, hybrid), _medians(report, baseline)

    hybrid_hits = sorted(f for f, m in h.items() if f <= small_max and m <= threshold)
    baseline_early = sorted(f for f, m in b.items() if f < large_min and m <= threshold)
    passed = bool(hybrid_hits) and not baseline_early
    return Verdict(
        criterion="hybrid-small-window",
        passed=passed,
        detail=(
            f"{hybrid} <= {threshold}% at fractions {hybrid_hits or 'none'} "
            f"(need one <= {small_max}); "
            f"{baseline} <= {threshold}% below {large_min} at {baseline_early or 'none'}"
        ),
    )


def hybrid_dominates(report: EvalReport, args: dict[str, Any]) -> Verdict:
    """hybrid median <= baseline median at every listed fraction (all fractions by default)."""
    hybrid, baseline = args.get("hybrid", "hybrid-fmm"), args.get("baseline", "extra")
    h, b = _medians(report, hybrid), _medians(report, baseline)
    fractions = [float(f) for f in args.get("fractions", sorted(h))]
    worse = [f for f in fractions if _at(h, f, hybrid) > _at(b, f, baseline)]
    return Verdict(
        criterion="fmm-hybrid-dominates",
        passed=not worse,
        detail=f"{hybrid} worse than {baseline} at fractions {worse or 'none'}",
    )


def hybrid_not_worse(report: EvalReport, args: dict[str, Any]) -> Verdict:
    """hybrid median <= slack * baseline median at the smallest fraction."""
    hybrid, baseline = args.get("hybrid", "hybrid-stencil"), args.get("baseline", "extra")
    slack = float(args.get("slack", 1.0))
    h, b = _medians(report, hybrid), _medians(report, baseline)
    fraction = min(h)
    hm, bm = h[fraction], _at(b, fraction, baseline)
    return Verdict(
        criterion="hybrid-not-worse",
        passed=hm <= slack * bm,
        detail=f"at fraction {fraction}: {hybrid} {hm:.3f}% vs {slack} x {baseline} {bm:.3f}%",
    )


CRITERIA: dict[str, Criterion] = {
    "hybrid-halves-error": hybrid_halves_error,
    "hybrid-small-window": hybrid_small_window,
    "fmm-hybrid-dominates": hybrid_dominates,
    "hybrid-not-worse": hybrid_not_worse,
}


def judge(criterion: str, report: EvalReport, args: dict[str, Any]) -> Verdict:
    try:
        fn = CRITERIA[criterion]
    except KeyError:
        raise RecipeError(f"unknown criterion '{criterion}'", {"known": sorted(CRITERIA)}) from None
    return fn(report, args)
