
# Prediction error metrics.

from __future__ import annotations

import numpy as np

from perfweld.core.exception import EvaluationError


def mape(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """
    Mean absolute percentage error, in percent:

        (100 / n) * sum(|y_true - y_pred| / y_true)
    """
    t = np.asarray(y_true, dtype=np.float64).ravel()
    p = np.asarray(y_pred, dtype=np.float64).ravel()
    if t.shape != p.shape:
        raise EvaluationError(
            f"length mismatch: {t.shape[0]} true values, {p.shape[0]} predictions",
            {"n_true": int(t.shape[0]), "n_pred": int(p.shape[0])},
        )
    if t.size == 0:
        raise EvaluationError("mape needs at least one value")
    if np.any(~np.isfinite(t) | (t <= 0)):
        bad = int(np.flatnonzero(~np.isfinite(t) | (t <= 0))[0])
        raise EvaluationError(
            "true values must be strictly positive", {"index": bad, "value": float(t[bad])}
        )
    return float(100.0 * np.mean(np.abs(t - p) / t))
