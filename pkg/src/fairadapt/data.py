"""Typed tabular dataset: CSV ingestion, metadata sidecar, group split.

Columns are continuous, ordered discrete, or unordered categorical. Leveled
columns are stored as integer codes into their declared level list; continuous
columns as float64. Missing values are rejected at ingestion, never imputed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DataError
from .graph import CausalGraph

__all__ = [
    "CONTINUOUS",
    "DISCRETE_ORDERED",
    "CATEGORICAL_UNORDERED",
    "ColumnSpec",
    "Dataset",
    "ingest",
    "emit",
    "serialize_metadata",
    "parse_metadata",
    "split",
]

CONTINUOUS = "continuous"
DISCRETE_ORDERED = "discrete_ordered"
CATEGORICAL_UNORDERED = "categorical_unordered"
_KINDS = (CONTINUOUS, DISCRETE_ORDERED, CATEGORICAL_UNORDERED)
_ROLES = ("attribute", "feature", "outcome")


@dataclass(frozen=True)
class ColumnSpec:
    """Kind, declared levels (for non-continuous columns) and role."""

    kind: str
    role: str
    levels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DataError(f"unknown column kind {self.kind!r}")
        if self.role not in _ROLES:
            raise DataError(f"unknown column role {self.role!r}")
        if self.kind == CONTINUOUS:
            if self.levels is not None:
                raise DataError("continuous columns do not take levels")
        else:
            if not self.levels:
                raise DataError(f"{self.kind} column needs a non-empty level list")
            if len(set(self.levels)) != len(self.levels):
                raise DataError(f"duplicate levels in {self.levels}")

    @property
    def is_leveled(self) -> bool:
        return self.kind != CONTINUOUS


class Dataset:
    """Immutable row-major dataset aligned with a causal graph.

    ``values`` maps column name to a float64 array (continuous) or an int64
    code array (leveled). ``is_test`` marks data whose outcome column is
    absent or must be treated as unknown by the adapter.
    """

    def __init__(
        self,
        schema: Mapping[str, ColumnSpec],
        values: Mapping[str, np.ndarray],
        baseline: str | None = None,
        is_test: bool = False,
    ):
        self.schema: dict[str, ColumnSpec] = dict(schema)
        self.values: dict[str, np.ndarray] = {}
        lengths = set()
        for name, spec in self.schema.items():
            arr = np.asarray(values[name])
            if spec.kind == CONTINUOUS:
                arr = arr.astype(np.float64)
                if not np.all(np.isfinite(arr)):
                    raise DataError(f"non-finite value in continuous column {name!r}")
            else:
                arr = arr.astype(np.int64)
                if arr.size and (arr.min() < 0 or arr.max() >= len(spec.levels)):
                    raise DataError(f"level code out of range in column {name!r}")
            arr.flags.writeable = False
            self.values[name] = arr
            lengths.add(arr.shape[0])
        if len(lengths) > 1:
            raise DataError(f"columns have unequal lengths: {sorted(lengths)}")
        self.n_rows: int = lengths.pop() if lengths else 0
        self.baseline = baseline
        self.is_test = bool(is_test)
        attr = [n for n, s in self.schema.items() if s.role == "attribute"]
        if len(attr) != 1:
            raise DataError(f"expected exactly one attribute column, got {attr}")
        self.attribute: str = attr[0]
        if baseline is not None and baseline not in self.schema[self.attribute].levels:
            raise DataError(
                f"baseline {baseline!r} is not a level of {self.attribute!r}"
            )
        outs = [n for n, s in self.schema.items() if s.role == "outcome"]
        if len(outs) > 1:
            raise DataError(f"multiple outcome columns: {outs}")
        self.outcome: str | None = outs[0] if outs else None

    # --- helpers ---------------------------------------------------------

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(self.schema)

    @property
    def features(self) -> tuple[str, ...]:
        return tuple(n for n, s in self.schema.items() if s.role == "feature")

    def level_index(self, column: str, label: str) -> int:
        spec = self.schema[column]
        try:
            return spec.levels.index(label)
        except (AttributeError, ValueError):
            raise DataError(f"{label!r} is not a level of column {column!r}")

    def baseline_index(self) -> int:
        if self.baseline is None:
            raise DataError("dataset has no declared baseline level")
        return self.level_index(self.attribute, self.baseline)

    def baseline_mask(self) -> np.ndarray:
        return self.values[self.attribute] == self.baseline_index()

    def with_values(self, new_values: Mapping[str, np.ndarray]) -> "Dataset":
        vals = dict(self.values)
        vals.update(new_values)
        return Dataset(self.schema, vals, baseline=self.baseline, is_test=self.is_test)

    def take(self, rows: np.ndarray, is_test: bool | None = None) -> "Dataset":
        vals = {n: v[rows] for n, v in self.values.items()}
        return Dataset(
            self.schema,
            vals,
            baseline=self.baseline,
            is_test=self.is_test if is_test is None else is_test,
        )

    def drop_outcome(self) -> "Dataset":
        if self.outcome is None:
            return self
        schema = {n: s for n, s in self.schema.items() if n != self.outcome}
        vals = {n: v for n, v in self.values.items() if n != self.outcome}
        return Dataset(schema, vals, baseline=self.baseline, is_test=True)


# --- metadata sidecar ------------------------------------------------------


def parse_metadata(text: str) -> tuple[dict[str, ColumnSpec], str | None]:
    """Parse the JSON sidecar: per-column kind/levels/role plus baseline."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"metadata is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "columns" not in obj:
        raise DataError('metadata must be an object with a "columns" entry')
    schema: dict[str, ColumnSpec] = {}
    for name, entry in obj["columns"].items():
        if "kind" not in entry or "role" not in entry:
            raise DataError(f"metadata for column {name!r} needs kind and role")
        levels = entry.get("levels")
        schema[name] = ColumnSpec(
            kind=entry["kind"],
            role=entry["role"],
            levels=tuple(str(l) for l in levels) if levels is not None else None,
        )
    baseline = obj.get("baseline")
    return schema, (str(baseline) if baseline is not None else None)


def serialize_metadata(data: Dataset) -> str:
    cols = {}
    for name, spec in data.schema.items():
        entry: dict = {"kind": spec.kind, "role": spec.role}
        if spec.levels is not None:
            entry["levels"] = list(spec.levels)
        cols[name] = entry
    obj: dict = {"columns": cols}
    if data.baseline is not None:
        obj["baseline"] = data.baseline
    return json.dumps(obj, indent=2)


# --- CSV ---------------------------------------------------------------------


def ingest(csv_text: str, meta_text: str, graph: CausalGraph) -> Dataset:
    """Parse and validate a CSV against its metadata and the causal graph.

    The outcome column may be absent, in which case the dataset is marked as
    test data. Every other graph node must be present; unknown columns,
    missing cells and out-of-range values are rejected with the offending
    row/column named.
    """
    schema, baseline = parse_metadata(meta_text)
    for node in graph.nodes:
        if node not in schema:
            raise DataError(f"metadata missing column for graph node {node!r}")
    for name in schema:
        if name not in graph.nodes:
            raise DataError(f"metadata column {name!r} is not a graph node")
    if schema[graph.protected].role != "attribute":
        raise DataError(f"column {graph.protected!r} must have role 'attribute'")
    if schema[graph.outcome].role != "outcome":
        raise DataError(f"column {graph.outcome!r} must have role 'outcome'")

    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("CSV is empty (header row required)")
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        raise DataError("duplicate column names in CSV header")
    for h in header:
        if h not in schema:
            raise DataError(f"CSV column {h!r} not declared in metadata")
    missing = [n for n in schema if n not in header]
    is_test = False
    if missing == [graph.outcome]:
        is_test = True
        schema = {n: s for n, s in schema.items() if n != graph.outcome}
    elif missing:
        raise DataError(f"CSV missing columns: {missing}")

    raw: dict[str, list] = {name: [] for name in header}
    for row_idx, row in enumerate(reader):
        if len(row) != len(header):
            raise DataError(f"row {row_idx}: expected {len(header)} cells, got {len(row)}")
        for name, cell in zip(header, row):
            cell = cell.strip()
            if cell == "":
                raise DataError(f"missing cell at row {row_idx}, column {name!r}")
            spec = schema[name]
            if spec.kind == CONTINUOUS:
                try:
                    val = float(cell)
                except ValueError:
                    raise DataError(
                        f"row {row_idx}, column {name!r}: {cell!r} is not numeric"
                    )
                if not math.isfinite(val):
                    raise DataError(
                        f"row {row_idx}, column {name!r}: non-finite value {cell!r}"
                    )
                raw[name].append(val)
            else:
                if cell not in spec.levels:
                    raise DataError(
                        f"row {row_idx}, column {name!r}: value {cell!r} outside "
                        f"declared levels {list(spec.levels)}"
                    )
                raw[name].append(spec.levels.index(cell))

    values = {
        name: np.asarray(raw[name], dtype=np.float64 if schema[name].kind == CONTINUOUS else np.int64)
        for name in schema
    }
    # keep metadata order, not CSV header order
    return Dataset(schema, values, baseline=baseline, is_test=is_test)


def emit(data: Dataset) -> str:
    """CSV text; continuous values use shortest round-trip formatting."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(data.columns)
    cols = []
    for name in data.columns:
        spec = data.schema[name]
        vals = data.values[name]
        if spec.kind == CONTINUOUS:
            cols.append([repr(float(v)) for v in vals])
        else:
            cols.append([spec.levels[int(v)] for v in vals])
    for row in zip(*cols):
        writer.writerow(row)
    return out.getvalue()


# --- partitioning ------------------------------------------------------------


def split(data: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint train/test partition, deterministic given ``seed``.

    The test half keeps its outcome column for evaluation but is marked
    ``is_test`` so the adapter treats the outcome as unknown.
    """
    if data.outcome is None:
        raise DataError("split requires an outcome column")
    if not (0.0 < train_fraction < 1.0):
        raise DataError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = data.n_rows
    n_train = int(round(n * train_fraction))
    if n_train == 0 or n_train == n:
        raise DataError(
            f"train_fraction {train_fraction} leaves an empty partition at n={n}"
        )
    perm = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed)))).permutation(n)
    train_rows = np.sort(perm[:n_train])
    test_rows = np.sort(perm[n_train:])
    return data.take(train_rows), data.take(test_rows, is_test=True)
