
# Model bundles: self-describing JSON files holding one FittedModel.
#
# Layout:
#   {"format": "perfweld-model/1", "kind": "<ModelKind>", ...model.to_dict()}
#
# Loading dispatches on "kind". Floats are written by orjson, which emits the
# shortest round-tripping repr, so a reloaded model predicts bit-identically.

from __future__ import annotations

from pathlib import Path
from typing import Any

import orjson
from pydantic import ValidationError

from perfweld.analytical.model import AnalyticalModel
from perfweld.core.config import MODEL_FORMAT_TAG
from perfweld.core.exception import KindMismatchError, ModelFormatError, PerfweldError
from perfweld.core.io import atomic_write_json, read_json
from perfweld.hybrid.model import HybridModel
from perfweld.learn.model import LearnerModel
from perfweld.logging.logger import get_logger
from perfweld.schema.model import HYBRID_KINDS, LEARNER_KINDS, FittedModel, ModelKind

log = get_logger(__name__)


def model_to_bundle(model: FittedModel) -> dict[str, Any]:
    return {"format": MODEL_FORMAT_TAG, **model.to_dict()}


def model_from_bundle(payload: Any) -> FittedModel:
    if not isinstance(payload, dict):
        raise ModelFormatError("model bundle must be a JSON object")
    tag = payload.get("format")
    if tag != MODEL_FORMAT_TAG:
        raise ModelFormatError(
            f"unsupported model format {tag!r}, expected {MODEL_FORMAT_TAG!r}",
            {"format": tag},
        )
    try:
        kind = ModelKind(payload.get("kind"))
    except ValueError:
        raise ModelFormatError(f"unknown model kind {payload.get('kind')!r}") from None

    try:
        if kind in HYBRID_KINDS:
            return HybridModel.from_dict(payload)
        if kind in LEARNER_KINDS:
            return LearnerModel.from_dict(payload)
        return AnalyticalModel.from_dict(payload)
    except PerfweldError as exc:
        raise ModelFormatError(f"corrupt {kind} bundle: {exc.message}", exc.context) from exc
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ModelFormatError(f"corrupt {kind} bundle: {exc}") from exc


def save_model(model: FittedModel, path: str | Path) -> Path:
    written = atomic_write_json(path, model_to_bundle(model))
    log.info("model_saved", kind=str(model.kind), path=str(written))
    return written


def load_model(path: str | Path) -> FittedModel:
    """Load any bundle. Missing files raise OSError; bad content raises ModelFormatError."""
    try:
        payload = read_json(path)
    except orjson.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}", {"path": str(path)}) from exc
    return model_from_bundle(payload)


def save_hybrid(model: HybridModel, path: str | Path) -> Path:
    return save_model(model, path)


def load_hybrid(path: str | Path) -> HybridModel:
    model = load_model(path)
    if not isinstance(model, HybridModel):
        raise KindMismatchError(
            f"expected a hybrid model bundle, found kind {model.kind}",
            {"kind": str(model.kind), "path": str(path)},
        )
    return model
