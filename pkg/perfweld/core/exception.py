
# Errors raised by perfweld. Each carries a message plus a context dict that
# ends up in the structured log line and, inside the recipe pipeline, in
# state["errors"].
#
# Input problems (bad machine spec, malformed CSV, invalid config) map to
# exit code 1 in the CLI. Anything that is not a PerfweldError exits 2.
# Pydantic validators still raise ValueError; loaders wrap the resulting
# ValidationError into the matching subclass here.

from __future__ import annotations


class PerfweldError(Exception):
    """
    Base class for all perfweld exceptions.

    Carries a human-readable message and an optional dict of structured context
    that will be included in the log entry and the error state field.
    """

    def __init__(self, message: str, context: dict | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.context: dict = context or {}

    def to_dict(self) -> dict:
        """Serialize to a dict suitable for appending to state['errors']."""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "context": self.context,
        }


# ------------------------------------------------------------------
# Configuration / input files
# ------------------------------------------------------------------

class ConfigurationError(PerfweldError):
    """Invalid settings or CLI flag combination."""


class MachineSpecError(PerfweldError):
    """A machine spec file is missing a field or violates an invariant."""

    def __init__(self, message: str, field: str | None = None, context: dict | None = None) -> None:
        ctx = context or {}
        if field is not None:
            ctx["field"] = field
        super().__init__(message, ctx)
        self.field = field


class DatasetError(PerfweldError):
    """
    A dataset file or in-memory dataset violates the schema.
    `row` is the 1-based data row number (header excluded) when known.
    """

    def __init__(self, message: str, row: int | None = None, context: dict | None = None) -> None:
        ctx = context or {}
        if row is not None:
            ctx["row"] = row
        super().__init__(message, ctx)
        self.row = row


class SchemaMismatchError(PerfweldError):
    """Dataset columns do not match what a model needs."""


# ------------------------------------------------------------------
# Analytical models
# ------------------------------------------------------------------

class StencilConfigError(PerfweldError):
    """Invalid stencil configuration, e.g. a block size that does not divide its dimension."""


class FmmConfigError(PerfweldError):
    """Invalid FMM configuration."""


class AnalyticalModelError(PerfweldError):
    """
    The analytical model rejected the features of one dataset row.
    Carries the 0-based row index so the caller can point at the input.
    """

    def __init__(self, message: str, row_index: int, context: dict | None = None) -> None:
        ctx = context or {}
        ctx["row_index"] = row_index
        super().__init__(message, ctx)
        self.row_index = row_index


# ------------------------------------------------------------------
# Learning / persistence
# ------------------------------------------------------------------

class FitError(PerfweldError):
    """A learner could not be fit with the given data and parameters."""


class ModelFormatError(PerfweldError):
    """A model bundle has an unknown format tag or could not be parsed."""


class KindMismatchError(PerfweldError):
    """A model bundle holds a different kind of model than the caller asked for."""


# ------------------------------------------------------------------
# Bench harness
# ------------------------------------------------------------------

class TraceLimitError(PerfweldError):
    """The grid is too large for the trace-driven cache simulator."""


class BenchError(PerfweldError):
    """A bench plan could not be executed."""


class OracleError(PerfweldError):
    """A synthetic oracle spec is invalid or failed at a point."""


# ------------------------------------------------------------------
# Evaluation / recipes
# ------------------------------------------------------------------

class EvaluationError(PerfweldError):
    """Metric or learning-curve inputs are inconsistent."""


class RecipeError(PerfweldError):
    """A reproduction recipe is unknown or malformed."""
