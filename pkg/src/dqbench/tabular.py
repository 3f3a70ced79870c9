"""Typed column-major tables, CSV + manifest I/O, and encoding helpers."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

CATEGORICAL = "categorical"
NUMERICAL = "numerical"
DATE = "date"
KINDS = (CATEGORICAL, NUMERICAL, DATE)


class DataError(ValueError):
    """Input data does not match its declared schema."""


def value_sort_key(v):
    # ints sort before strings; needed when an int-coded column has a text placeholder
    if isinstance(v, str):
        return (1, 0, v)
    return (0, v, "")


@dataclass(frozen=True)
class ColumnMeta:
    name: str
    kind: str
    placeholder: Any = None
    is_target: bool = False
    value_base: str = "text"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.value_base not in ("text", "int"):
            raise DataError(f"column {self.name!r}: value_base must be 'text' or 'int'")

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    @property
    def is_numerical(self) -> bool:
        return self.kind == NUMERICAL

    def is_missing(self, values: np.ndarray) -> np.ndarray:
        if self.placeholder is None:
            return np.zeros(len(values), dtype=bool)
        if self.kind == NUMERICAL:
            return np.asarray(values, dtype=float) == float(self.placeholder)
        return _object_eq(values, self.placeholder)


def _object_eq(values: np.ndarray, scalar) -> np.ndarray:
    """Elementwise equality that also requires equal types (1 != "1", 1 != True)."""
    values = np.asarray(values, dtype=object)
    out = np.asarray(values == scalar, dtype=bool)
    for i in np.flatnonzero(out):
        if type(values[i]) is not type(scalar):
            out[i] = False
    return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _as_column(meta: ColumnMeta, values) -> np.ndarray:
    if meta.kind == NUMERICAL:
        arr = np.array(values, dtype=float, copy=True)
    else:
        arr = np.empty(len(values), dtype=object)
        arr[:] = list(values)
    return _freeze(arr)


class Dataset:
    """Immutable table: one typed array per column plus row-aligned extras.

    ``extras`` carries row-aligned side information that must follow rows
    through subsetting, e.g. the continuous target kept after discretization.
    """

    def __init__(self, columns: Sequence[ColumnMeta], data: Mapping[str, Any],
                 extras: Mapping[str, Any] | None = None):
        columns = tuple(columns)
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise DataError("column names must be unique")
        targets = [c for c in columns if c.is_target]
        if len(targets) != 1:
            raise DataError(f"exactly one target column required, got {len(targets)}")
        self.columns = columns
        self._meta = {c.name: c for c in columns}
        self._data = {c.name: _as_column(c, data[c.name]) for c in columns}
        lengths = {len(v) for v in self._data.values()}
        if len(lengths) != 1:
            raise DataError("all columns must have the same length")
        self.n = lengths.pop()
        if self.n < 1:
            raise DataError("dataset has zero rows")
        self.extras = {k: _freeze(np.array(v, copy=True)) for k, v in (extras or {}).items()}
        for k, v in self.extras.items():
            if len(v) != self.n:
                raise DataError(f"extra {k!r} is not row-aligned")
        self._domain_cache: dict[str, tuple] = {}

    # -- schema ---------------------------------------------------------
    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def target(self) -> ColumnMeta:
        return next(c for c in self.columns if c.is_target)

    @property
    def features(self) -> list[ColumnMeta]:
        return [c for c in self.columns if not c.is_target]

    @property
    def f(self) -> int:
        return len(self.features)

    def meta(self, name: str) -> ColumnMeta:
        return self._meta[name]

    def __getitem__(self, name: str) -> np.ndarray:
        return self._data[name]

    def domain(self, name: str) -> tuple:
        """Sorted distinct non-placeholder values of a categorical column."""
        if name not in self._domain_cache:
            meta = self._meta[name]
            vals = self._data[name][~meta.is_missing(self._data[name])]
            self._domain_cache[name] = tuple(sorted(set(vals.tolist()), key=value_sort_key))
        return self._domain_cache[name]

    @property
    def target_values(self) -> np.ndarray:
        return self._data[self.target.name]

    # -- derivation -----------------------------------------------------
    def with_column(self, name: str, values, meta: ColumnMeta | None = None) -> "Dataset":
        cols = [meta if (c.name == name and meta is not None) else c for c in self.columns]
        data = dict(self._data)
        data[name] = values
        return Dataset(cols, data, self.extras)

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        data = {k: v[rows] for k, v in self._data.items()}
        extras = {k: v[rows] for k, v in self.extras.items()}
        return Dataset(self.columns, data, extras)

    def rows(self) -> Iterable[tuple]:
        cols = [self._data[c.name].tolist() for c in self.columns]
        return zip(*cols)

    def equals(self, other: "Dataset") -> bool:
        if self.columns != other.columns or self.n != other.n:
            return False
        for c in self.columns:
            a, b = self._data[c.name], other._data[c.name]
            if c.kind == NUMERICAL:
                if not np.array_equal(a, b):
                    return False
            elif a.tolist() != b.tolist():
                return False
        return True

    def fingerprint(self) -> str:
        """Stable content hash, used for scenario identity checks."""
        import hashlib
        h = hashlib.sha256()
        for c in self.columns:
            h.update(repr(c).encode())
            vals = self._data[c.name]
            if c.kind == NUMERICAL:
                h.update(vals.tobytes())
            else:
                h.update(repr(vals.tolist()).encode())
        return h.hexdigest()

    def __repr__(self):
        return f"Dataset(n={self.n}, f={self.f}, target={self.target.name!r})"


@dataclass(frozen=True)
class PairedDataset:
    current: Dataset
    ground_truth: Dataset

    def __post_init__(self):
        if self.current.columns != self.ground_truth.columns:
            raise DataError("current and ground truth schemas differ")
        if self.current.n != self.ground_truth.n:
            raise DataError("current and ground truth row counts differ")

    def with_current(self, ds: Dataset) -> "PairedDataset":
        return PairedDataset(ds, self.ground_truth)


def snapshot_ground_truth(ds: Dataset | PairedDataset) -> PairedDataset:
    if isinstance(ds, PairedDataset):
        return ds
    gt = Dataset(ds.columns, {c.name: ds[c.name] for c in ds.columns}, ds.extras)
    return PairedDataset(ds, gt)


# ---------------------------------------------------------------------------
# manifest + CSV


@dataclass
class DatasetManifest:
    columns: list[ColumnMeta]
    target: str
    bin_step: float | None = None
    delimiter: str = ","
    name: str = "dataset"

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "DatasetManifest":
        try:
            target = raw["target"]
            specs = raw["columns"]
        except KeyError as exc:
            raise DataError(f"manifest missing key {exc.args[0]!r}") from None
        cols = []
        for spec in specs:
            cols.append(ColumnMeta(
                name=spec["name"],
                kind=spec.get("kind", NUMERICAL),
                placeholder=spec.get("placeholder"),
                is_target=spec["name"] == target,
                value_base=spec.get("value_base", "text"),
            ))
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            raise DataError("manifest column names must be unique")
        if target not in names:
            raise DataError(f"manifest target {target!r} is not a declared column")
        dialect = raw.get("dialect", {}) or {}
        return cls(cols, target, raw.get("bin_step"), dialect.get("delimiter", ","),
                   raw.get("name", "dataset"))

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        with open(path, encoding="utf-8") as fh:
            m = cls.from_dict(json.load(fh))
        if m.name == "dataset":
            m.name = Path(path).stem.replace(".manifest", "")
        return m

    def to_dict(self) -> dict:
        cols = []
        for c in self.columns:
            spec = {"name": c.name, "kind": c.kind}
            if c.kind == CATEGORICAL:
                spec["value_base"] = c.value_base
            if c.placeholder is not None:
                spec["placeholder"] = c.placeholder
            cols.append(spec)
        return {"name": self.name, "target": self.target, "columns": cols,
                "bin_step": self.bin_step, "dialect": {"delimiter": self.delimiter}}

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def for_dataset(cls, ds: Dataset, name: str = "dataset", bin_step=None) -> "DatasetManifest":
        return cls(list(ds.columns), ds.target.name, bin_step, ",", name)


def _parse_cell(meta: ColumnMeta, raw: str, row: int):
    if meta.placeholder is not None and raw == _format_cell(meta, meta.placeholder):
        return float(meta.placeholder) if meta.kind == NUMERICAL else meta.placeholder
    if meta.kind == NUMERICAL:
        try:
            return float(raw)
        except ValueError:
            raise DataError(f"row {row}, column {meta.name!r}: cannot parse {raw!r} as a number") from None
    if meta.kind == CATEGORICAL and meta.value_base == "int":
        try:
            return int(raw)
        except ValueError:
            raise DataError(f"row {row}, column {meta.name!r}: cannot parse {raw!r} as an integer category") from None
    return raw


def _format_cell(meta: ColumnMeta, v) -> str:
    if meta.kind == NUMERICAL:
        return repr(float(v))
    return str(v)


def load_csv(path, manifest: DatasetManifest) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=manifest.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("dataset has zero rows") from None
        index = {name: i for i, name in enumerate(header)}
        missing = [c.name for c in manifest.columns if c.name not in index]
        if manifest.target in missing:
            raise DataError(f"target column {manifest.target!r} missing from {path}")
        if missing:
            raise DataError(f"columns missing from {path}: {missing}")
        values: dict[str, list] = {c.name: [] for c in manifest.columns}
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise DataError(f"row {lineno}: expected {len(header)} fields, got {len(rec)}")
            for c in manifest.columns:
                values[c.name].append(_parse_cell(c, rec[index[c.name]], lineno))
    if not values[manifest.target]:
        raise DataError("dataset has zero rows")
    ds = Dataset(manifest.columns, values)
    _check_placeholders(ds)
    return ds


def _check_placeholders(ds: Dataset) -> None:
    for c in ds.columns:
        if c.kind != NUMERICAL or c.placeholder is None:
            continue
        vals = ds[c.name][~c.is_missing(ds[c.name])]
        if len(vals) and vals.min() <= float(c.placeholder) <= vals.max():
            raise DataError(f"column {c.name!r}: placeholder {c.placeholder!r} lies inside "
                            f"the observed range [{vals.min()}, {vals.max()}]")


def save_csv(ds: Dataset, path, delimiter: str = ",") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(ds.names)
        fmt = [(c, ds[c.name].tolist()) for c in ds.columns]
        for i in range(ds.n):
            writer.writerow([_format_cell(c, vals[i]) for c, vals in fmt])


# ---------------------------------------------------------------------------
# encoding


@dataclass(frozen=True)
class ColumnMap:
    """Provenance of each encoded column: (source column, category or None)."""
    entries: tuple[tuple[str, Any], ...]

    def __len__(self):
        return len(self.entries)


def fit_column_map(ds: Dataset) -> ColumnMap:
    entries: list[tuple[str, Any]] = []
    for c in ds.features:
        if c.kind == NUMERICAL:
            entries.append((c.name, None))
        elif c.kind == CATEGORICAL:
            cats = list(ds.domain(c.name))
            if c.placeholder is not None and c.is_missing(ds[c.name]).any():
                cats.append(c.placeholder)
            entries.extend((c.name, v) for v in cats)
    return ColumnMap(tuple(entries))


def one_hot_encode(ds: Dataset, column_map: ColumnMap | None = None) -> tuple[np.ndarray, ColumnMap]:
    """Encode non-target features as a float matrix.

    Categorical features expand to one indicator per category (a present
    placeholder is a category of its own); numerical features pass through;
    dates are dropped. With a ``column_map`` from another dataset, unseen
    categories encode as all-zero rows.
    """
    if column_map is None:
        column_map = fit_column_map(ds)
    X = np.zeros((ds.n, len(column_map)), dtype=float)
    slots: dict[str, dict] = {}
    for j, (name, cat) in enumerate(column_map.entries):
        if cat is None:
            X[:, j] = ds[name]
        else:
            slots.setdefault(name, {})[(type(cat), cat)] = j
    for name, lookup in slots.items():
        values = ds[name]
        for (_, cat), j in lookup.items():
            X[:, j] = _object_eq(values, cat)
    return X, column_map


def discretize_target(ds: Dataset, bin_step: float) -> Dataset:
    """Replace a numerical target with integer bins ``floor(value / bin_step)``.

    The continuous values are kept in ``extras["source_target"]``.
    """
    t = ds.target
    if t.kind != NUMERICAL:
        raise DataError(f"target {t.name!r} is not numerical")
    if not bin_step > 0:
        raise DataError("bin_step must be positive")
    raw = ds[t.name]
    classes = np.floor(raw / bin_step).astype(np.int64).tolist()
    meta = replace(t, kind=CATEGORICAL, value_base="int", placeholder=None)
    extras = dict(ds.extras)
    extras.setdefault("source_target", raw)
    out = ds.with_column(t.name, classes, meta)
    return Dataset(out.columns, {c.name: out[c.name] for c in out.columns}, extras)


def class_counts(labels) -> dict:
    uniq, codes = _codes(labels)
    return dict(zip(uniq, np.bincount(codes, minlength=len(uniq)).tolist()))


def _codes(labels) -> tuple[list, np.ndarray]:
    """Factorize labels: (sorted distinct values, integer code per row)."""
    labels = list(labels.tolist() if isinstance(labels, np.ndarray) else labels)
    uniq = sorted(set(labels), key=value_sort_key)
    index = {(type(v), v): i for i, v in enumerate(uniq)}
    codes = np.fromiter((index[(type(v), v)] for v in labels), dtype=np.int64, count=len(labels))
    return uniq, codes


def drop_small_classes(ds: Dataset, min_count: int, labels=None) -> Dataset:
    """Remove rows whose class has fewer than ``min_count`` members.

    ``labels`` overrides the target as the class assignment (regression data
    grouped by discretized bins).
    """
    if labels is None:
        if ds.target.kind != CATEGORICAL:
            raise DataError("drop_small_classes needs a classified target")
        labels = ds.target_values
    uniq, codes = _codes(labels)
    counts = np.bincount(codes, minlength=len(uniq))
    keep = counts[codes] >= min_count
    if not keep.any():
        raise DataError("empty result: every class is smaller than min_count")
    return ds.take(np.flatnonzero(keep))


def class_labels(ds: Dataset, bin_step: float | None = None) -> np.ndarray:
    """Class assignment per row: the target itself, or its bins for numeric targets."""
    t = ds.target
    if t.kind == CATEGORICAL:
        return ds.target_values
    if bin_step is None:
        raise DataError(f"target {t.name!r} is numerical; a bin_step is required")
    out = np.empty(ds.n, dtype=object)
    out[:] = np.floor(ds.target_values / bin_step).astype(np.int64).tolist()
    return out


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5 + 1e-9))
