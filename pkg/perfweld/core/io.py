
# Atomic file output. Every artifact perfweld writes goes through here so an
# interrupted run never leaves a half-written CSV or bundle behind.

import os
import tempfile
from pathlib import Path

import orjson

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_SORT_KEYS


def atomic_write_bytes(path: str | Path, data: bytes) -> Path:
    """Write `data` to a temp file beside `path`, then rename over it."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or Path("."))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return target


def atomic_write_text(path: str | Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_json(path: str | Path, payload: object) -> Path:
    return atomic_write_bytes(path, orjson.dumps(payload, option=JSON_OPTIONS))


def read_json(path: str | Path) -> object:
    """Parse a JSON file. Raises OSError or orjson.JSONDecodeError."""
    return orjson.loads(Path(path).read_bytes())
