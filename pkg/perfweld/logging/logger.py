
# Structured logging for perfweld.
#
# structlog is configured once per process from Settings (level + format).
# Modules obtain a logger with get_logger(__name__) and log snake_case events
# with key/value context:
#
#   log = get_logger(__name__)
#   log.info("curve_cell_done", model="extra", fraction=0.02, seed=3, mape=12.4)
#
# The CLI binds run_id into contextvars so every line of a run can be grouped.

import logging
import sys

import orjson
import structlog

from perfweld.core.config import get_settings

_configured = False


def _orjson_dumps(obj: object, default=None) -> str:
    return orjson.dumps(obj, default=default).decode("utf-8")


def configure_logging(force: bool = False) -> None:
    """Idempotent structlog setup. Logs go to stderr so stdout stays clean for tables."""
    global _configured
    if _configured and not force:
        return

    settings = get_settings()
    level = logging.getLevelName(settings.log_level)

    processors: list = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]
    if settings.log_format == "json":
        processors.append(structlog.processors.JSONRenderer(serializer=_orjson_dumps))
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    _configured = True


def get_logger(name: str | None = None) -> structlog.typing.FilteringBoundLogger:
    configure_logging()
    if name:
        return structlog.get_logger(name).bind(logger=name)
    return structlog.get_logger()


def bind_run(run_id: str, **extra: object) -> None:
    """Attach a run id (and any other context) to every subsequent log line."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(run_id=run_id, **extra)
