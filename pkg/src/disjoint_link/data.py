"""Tabular datasets with binary outcomes: ingestion, cleaning, splitting.

CSV files come in RFC-4180 shape with a header row; missing cells are empty
strings. Categorical columns are one-hot encoded (one column per category,
none dropped), missing numerics take the column median, missing categoricals
the column mode. All downstream distance computations assume `standardize`
has been applied first.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

LABEL_COLUMN = "label"


class DataError(ValueError):
    """Raised on malformed input data or violated preconditions."""


@dataclass(frozen=True)
class FeatureSchema:
    """One source column: numeric, or categorical with its category labels."""

    name: str
    kind: str  # "numeric" | "categorical"
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise DataError(f"unknown feature kind {self.kind!r}")
        if self.kind == "categorical" and len(self.categories) < 2:
            raise DataError(f"categorical feature {self.name!r} needs >= 2 categories")
        if self.kind == "numeric" and self.categories:
            raise DataError(f"numeric feature {self.name!r} must not carry categories")

    @property
    def encoded_names(self) -> list[str]:
        """Column names after encoding: the name itself, or name=category."""
        if self.kind == "numeric":
            return [self.name]
        return [f"{self.name}={c}" for c in self.categories]


def _check_schema(schema: list[FeatureSchema]) -> None:
    names = [s.name for s in schema]
    if len(set(names)) != len(names):
        raise DataError("feature names must be unique within a schema")


@dataclass(frozen=True)
class Dataset:
    """N samples by K encoded numeric features plus binary outcome labels."""

    schema: tuple[FeatureSchema, ...]
    X: np.ndarray
    y: np.ndarray
    id: str

    def __post_init__(self):
        _check_schema(list(self.schema))
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y)
        if X.ndim != 2:
            raise DataError("X must be 2-D")
        if X.shape[0] != y.shape[0]:
            raise DataError(f"row count {X.shape[0]} != label count {y.shape[0]}")
        if X.shape[0] < 2:
            raise DataError("a dataset needs at least 2 samples")
        if X.shape[1] < 1:
            raise DataError("a dataset needs at least 1 feature")
        if not np.all(np.isfinite(X)):
            raise DataError("X contains non-finite values after ingestion")
        if not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        expected = sum(len(s.encoded_names) for s in self.schema)
        if expected != X.shape[1]:
            raise DataError(f"schema encodes {expected} columns but X has {X.shape[1]}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y.astype(np.int64))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    @property
    def feature_names(self) -> list[str]:
        return [n for s in self.schema for n in s.encoded_names]

    def require_both_classes(self) -> None:
        if not (np.any(self.y == 0) and np.any(self.y == 1)):
            raise DataError(f"dataset {self.id!r} must contain both classes")


@dataclass(frozen=True)
class StandardizationParams:
    """Per-column mean and population standard deviation; zero stddev marks a
    constant column, which standardization maps to all zeros."""

    means: np.ndarray
    stddevs: np.ndarray

    @property
    def constant_mask(self) -> np.ndarray:
        return self.stddevs == 0.0


def fit_standardization(X: np.ndarray) -> StandardizationParams:
    X = np.asarray(X, dtype=np.float64)
    means = X.mean(axis=0)
    stddevs = X.std(axis=0)  # population convention, divide by N
    return StandardizationParams(means=means, stddevs=stddevs)


def apply_standardization(params: StandardizationParams, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    safe = np.where(params.constant_mask, 1.0, params.stddevs)
    out = (X - params.means) / safe
    out[:, params.constant_mask] = 0.0
    return out


def invert_standardization(params: StandardizationParams, X: np.ndarray) -> np.ndarray:
    return np.asarray(X, dtype=np.float64) * params.stddevs + params.means


def standardize(d: Dataset) -> tuple[Dataset, StandardizationParams]:
    """Z-score every column (population stddev); constant columns become zero."""
    params = fit_standardization(d.X)
    out = Dataset(d.schema, apply_standardization(params, d.X), d.y, d.id)
    return out, params


def stratified_kfold(d: Dataset, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic stratified k-fold split of a dataset's row indices.

    Each class is shuffled with the seed and dealt round-robin, so per-fold
    class counts differ by at most one.
    """
    if folds < 2:
        raise DataError("folds must be >= 2")
    d.require_both_classes()
    rng = np.random.default_rng(seed)
    test_folds: list[list[int]] = [[] for _ in range(folds)]
    for cls in (0, 1):
        members = np.flatnonzero(d.y == cls)
        if members.size < folds:
            raise DataError(f"class {cls} has {members.size} members, fewer than {folds} folds")
        perm = rng.permutation(members)
        for pos, row in enumerate(perm):
            test_folds[pos % folds].append(int(row))
    all_idx = np.arange(d.n)
    out = []
    for f in range(folds):
        test = np.sort(np.array(test_folds[f], dtype=np.int64))
        train = np.setdiff1d(all_idx, test)
        out.append((train, test))
    return out


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def _column_is_numeric(cells: list[str]) -> bool:
    present = [c for c in cells if c != ""]
    return all(_parse_float(c) is not None for c in present)


def load_csv(
    path: str | Path,
    label_column: str,
    schema_hints: list[FeatureSchema] | None = None,
) -> Dataset:
    """Read a CSV into a Dataset: infer column kinds, impute, one-hot encode.

    Numeric gaps are filled with the column median, categorical gaps with the
    column mode (ties broken lexicographically). Labels must coerce to {0,1}.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not found in {path}")
    if len(body) < 2:
        raise DataError(f"{path} has fewer than 2 data rows")
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise DataError(f"{path} row {i + 2} has {len(row)} cells, expected {len(header)}")

    columns = {name: [row[j] for row in body] for j, name in enumerate(header)}

    labels = []
    for i, cell in enumerate(columns[label_column]):
        v = _parse_float(cell)
        if v is None or v not in (0.0, 1.0):
            raise DataError(f"non-binary label {cell!r} at row {i + 2} of {path}")
        labels.append(int(v))
    y = np.array(labels, dtype=np.int64)

    hints = {h.name: h for h in (schema_hints or [])}
    schema: list[FeatureSchema] = []
    blocks: list[np.ndarray] = []
    for name in header:
        if name == label_column:
            continue
        cells = columns[name]
        present = [c for c in cells if c != ""]
        if not present:
            raise DataError(f"column {name!r} has no values to impute from")
        hint = hints.get(name)
        numeric = hint.kind == "numeric" if hint else _column_is_numeric(cells)
        if numeric:
            vals = [_parse_float(c) for c in cells]
            med = float(np.median([v for v in vals if v is not None]))
            col = np.array([med if v is None else v for v in vals], dtype=np.float64)
            if not np.all(np.isfinite(col)):
                raise DataError(f"column {name!r} contains non-finite values")
            schema.append(FeatureSchema(name, "numeric"))
            blocks.append(col[:, None])
        else:
            if hint and hint.categories:
                cats = list(hint.categories)
                unknown = sorted(set(present) - set(cats))
                if unknown:
                    raise DataError(f"column {name!r} has values outside hinted categories: {unknown}")
            else:
                cats = sorted(set(present))
            if len(cats) < 2:
                raise DataError(f"categorical column {name!r} has a single category {cats[0]!r}")
            counts = {c: 0 for c in cats}
            for c in present:
                counts[c] += 1
            # mode, ties broken lexicographically
            best = max(counts.values())
            mode = min(c for c in cats if counts[c] == best)
            onehot = np.zeros((len(cells), len(cats)), dtype=np.float64)
            pos = {c: j for j, c in enumerate(cats)}
            for i, cell in enumerate(cells):
                onehot[i, pos[cell if cell != "" else mode]] = 1.0
            schema.append(FeatureSchema(name, "categorical", tuple(cats)))
            blocks.append(onehot)
    if not blocks:
        raise DataError(f"{path} has no feature columns besides the label")
    X = np.hstack(blocks)
    return Dataset(tuple(schema), X, y, id=path.stem)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def dataset_to_csv(d: Dataset, path: str | Path, label_column: str = LABEL_COLUMN) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(d.feature_names + [label_column])
        for i in range(d.n):
            writer.writerow([repr(float(v)) for v in d.X[i]] + [int(d.y[i])])


def schema_to_json(schema: tuple[FeatureSchema, ...] | list[FeatureSchema]) -> list[dict]:
    return [
        {"name": s.name, "kind": s.kind, "categories": list(s.categories)}
        for s in schema
    ]


def schema_from_json(doc: list[dict]) -> tuple[FeatureSchema, ...]:
    return tuple(
        FeatureSchema(e["name"], e["kind"], tuple(e.get("categories", ()))) for e in doc
    )


def write_schema(schema, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schema_to_json(schema), indent=2) + "\n", encoding="utf-8")
