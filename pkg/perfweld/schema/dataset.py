
# Dataset container: named numeric features plus a positive response
# (execution time in seconds). Datasets are immutable; sampling and splitting
# return new instances sharing nothing mutable with the source.
#
# CSV format: UTF-8, one header row, decimal-point reals, one response column.

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from perfweld.core.exception import DatasetError, SchemaMismatchError
from perfweld.core.io import atomic_write_text


class DatasetSchema(BaseModel):
    """Ordered feature names plus the response column name."""

    model_config = ConfigDict(frozen=True)

    feature_names: tuple[str, ...]
    response_name: str = "time_seconds"

    @model_validator(mode="after")
    def _check_names(self) -> DatasetSchema:
        if not self.feature_names:
            raise ValueError("schema needs at least one feature")
        names = (*self.feature_names, self.response_name)
        if len(set(names)) != len(names):
            raise ValueError(f"schema names must be unique: {names}")
        return self

    @property
    def header(self) -> tuple[str, ...]:
        return (*self.feature_names, self.response_name)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def index_of(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise SchemaMismatchError(
                f"feature '{name}' not in schema", {"features": list(self.feature_names)}
            ) from None

    def with_feature(self, name: str) -> DatasetSchema:
        return DatasetSchema(
            feature_names=(*self.feature_names, name), response_name=self.response_name
        )

    def require(self, names: Sequence[str], what: str) -> None:
        missing = [n for n in names if n not in self.feature_names]
        if missing:
            raise SchemaMismatchError(
                f"{what} needs features {list(names)}; dataset lacks {missing}",
                {"features": list(self.feature_names)},
            )

    @classmethod
    def from_header(cls, header: Sequence[str], response_name: str) -> DatasetSchema:
        if response_name not in header:
            raise SchemaMismatchError(
                f"response column '{response_name}' not in header", {"header": list(header)}
            )
        return cls(
            feature_names=tuple(h for h in header if h != response_name),
            response_name=response_name,
        )


# Feature vectors of the experiments. Stencil: grid dims, block sizes,
# unroll factor, threads. FMM: threads, particles, particles per leaf, order.
STENCIL_SCHEMA = DatasetSchema(feature_names=("I", "J", "K", "b_i", "b_j", "b_k", "u", "t"))
STENCIL_GRID_SCHEMA = DatasetSchema(feature_names=("I", "J", "K"))
STENCIL_BLOCKED_SCHEMA = DatasetSchema(feature_names=("I", "J", "K", "b_i", "b_j", "b_k"))
STENCIL_THREADS_SCHEMA = DatasetSchema(feature_names=("I", "J", "K", "t"))
FMM_SCHEMA = DatasetSchema(feature_names=("t", "N", "q", "k"))

SCHEMA_PRESETS: dict[str, DatasetSchema] = {
    "stencil": STENCIL_SCHEMA,
    "stencil-grid": STENCIL_GRID_SCHEMA,
    "stencil-blocked": STENCIL_BLOCKED_SCHEMA,
    "stencil-threads": STENCIL_THREADS_SCHEMA,
    "fmm": FMM_SCHEMA,
}


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Rows of feature vectors with measured response times.

    X: (n, d) float64, read-only
    y: (n,) float64, strictly positive, read-only
    """

    schema: DatasetSchema
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.float64, copy=True)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, self.schema.n_features)
        if X.ndim != 2 or X.shape[1] != self.schema.n_features:
            raise DatasetError(
                f"feature matrix shape {X.shape} does not match {self.schema.n_features} features"
            )
        if y.shape != (X.shape[0],):
            raise DatasetError(f"response length {y.shape} does not match {X.shape[0]} rows")
        bad = np.flatnonzero(~np.isfinite(y) | (y <= 0))
        if bad.size:
            raise DatasetError("response must be strictly positive", row=int(bad[0]) + 1)
        if not np.all(np.isfinite(X)):
            row = int(np.flatnonzero(~np.all(np.isfinite(X), axis=1))[0]) + 1
            raise DatasetError("features must be finite", row=row)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return int(self.y.shape[0])

    @property
    def rows(self) -> list[tuple[tuple[float, ...], float]]:
        return [(tuple(map(float, x)), float(r)) for x, r in zip(self.X, self.y)]

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.schema.index_of(name)]

    def subset(self, indices: Sequence[int] | np.ndarray) -> Dataset:
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.schema, self.X[idx], self.y[idx])

    @classmethod
    def from_rows(
        cls, schema: DatasetSchema, rows: Sequence[tuple[Sequence[float], float]]
    ) -> Dataset:
        if not rows:
            return cls(schema, np.empty((0, schema.n_features)), np.empty(0))
        X = np.array([r[0] for r in rows], dtype=np.float64)
        y = np.array([r[1] for r in rows], dtype=np.float64)
        return cls(schema, X, y)


# ------------------------------------------------------------------
# CSV input / output
# ------------------------------------------------------------------

def _parse_float(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DatasetError(
            f"non-numeric value {cell!r} in column '{column}'", row=row, context={"column": column}
        ) from None
    if not math.isfinite(value):
        raise DatasetError(
            f"non-finite value in column '{column}'", row=row, context={"column": column}
        )
    return value


def read_csv_table(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Header and raw string cells of a CSV file; blank lines are skipped."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError(f"dataset not found: {p}", context={"path": str(p)}) from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DatasetError(f"dataset is empty: {p}", context={"path": str(p)}) from None
    cells = [row for row in reader if row and any(c.strip() for c in row)]
    return header, cells


def _rows_to_dataset(schema: DatasetSchema, header: list[str], cells: list[list[str]]) -> Dataset:
    X = np.empty((len(cells), schema.n_features))
    y = np.empty(len(cells))
    for i, row in enumerate(cells):
        row_no = i + 1
        if len(row) != len(header):
            raise DatasetError(f"expected {len(header)} cells, found {len(row)}", row=row_no)
        record = dict(zip(header, (c.strip() for c in row)))
        for j, name in enumerate(schema.feature_names):
            X[i, j] = _parse_float(record[name], row_no, name)
        response = _parse_float(record[schema.response_name], row_no, schema.response_name)
        if response <= 0:
            raise DatasetError(
                f"response must be positive, got {response}", row=row_no,
                context={"column": schema.response_name},
            )
        y[i] = response
    return Dataset(schema, X, y)


def load_dataset(path: str | Path, schema: DatasetSchema) -> Dataset:
    """Parse a CSV whose header must equal the schema (features then response, any order)."""
    header, cells = read_csv_table(path)
    if sorted(header) != sorted(schema.header) or len(header) != len(set(header)):
        raise DatasetError(
            f"header {header} does not match schema {list(schema.header)}",
            context={"header": header, "expected": list(schema.header)},
        )
    return _rows_to_dataset(schema, header, cells)


def read_dataset(path: str | Path, response_name: str) -> Dataset:
    """Parse a CSV inferring the schema from its header: every non-response column is a feature."""
    header, cells = read_csv_table(path)
    if len(header) != len(set(header)):
        raise DatasetError(f"duplicate column names in header {header}")
    try:
        schema = DatasetSchema.from_header(header, response_name)
    except ValueError as exc:
        raise DatasetError(f"invalid header {header}: {exc}") from exc
    return _rows_to_dataset(schema, header, cells)


def load_feature_table(
    path: str | Path, schema: DatasetSchema
) -> tuple[list[str], list[list[str]], np.ndarray]:
    """
    Header, raw cells and the feature matrix of a CSV that must contain the
    schema's feature columns. The response column is optional; extra columns
    are carried through untouched.
    """
    header, cells = read_csv_table(path)
    missing = [n for n in schema.feature_names if n not in header]
    if missing:
        raise SchemaMismatchError(
            f"input lacks feature columns {missing}",
            {"header": header, "expected": list(schema.feature_names)},
        )
    columns = [header.index(n) for n in schema.feature_names]
    X = np.empty((len(cells), schema.n_features))
    for i, row in enumerate(cells):
        if len(row) != len(header):
            raise DatasetError(f"expected {len(header)} cells, found {len(row)}", row=i + 1)
        for j, (name, col) in enumerate(zip(schema.feature_names, columns)):
            X[i, j] = _parse_float(row[col].strip(), i + 1, name)
    return header, cells, X


def format_float(value: float) -> str:
    """Shortest repr that round-trips; integral values print without a fraction."""
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def dataset_to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ds.schema.header)
    for x, r in zip(ds.X, ds.y):
        writer.writerow([*(format_float(v) for v in x), repr(float(r))])
    return buf.getvalue()


def save_dataset(ds: Dataset, path: str | Path) -> Path:
    return atomic_write_text(path, dataset_to_csv(ds))


# ------------------------------------------------------------------
# Sampling
# ------------------------------------------------------------------

def train_size(n: int, fraction: float) -> int:
    """floor(fraction * n), clamped to at least one row."""
    return max(1, math.floor(fraction * n))


def split_uniform(ds: Dataset, fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """
    Uniform random train/test split without replacement.

    Train gets max(1, floor(fraction * |ds|)) rows; test is the complement.
    Both keep the source row order. Deterministic per seed.
    """
    if len(ds) == 0:
        raise DatasetError("cannot split an empty dataset")
    if not 0.0 < fraction < 1.0:
        raise DatasetError(f"fraction must lie in (0, 1), got {fraction}")
    if seed < 0:
        raise DatasetError(f"seed must be non-negative, got {seed}")

    n_train = train_size(len(ds), fraction)
    rng = np.random.default_rng(seed)
    chosen = np.zeros(len(ds), dtype=bool)
    chosen[rng.choice(len(ds), size=n_train, replace=False)] = True
    return ds.subset(np.flatnonzero(chosen)), ds.subset(np.flatnonzero(~chosen))
