"""The six data-quality scores.

All functions are pure and deterministic. Missing entries are the cells
equal to a column's placeholder; categorical equality is exact (type and
value).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping

import numpy as np

from .tabular import CATEGORICAL, NUMERICAL, DataError, Dataset, PairedDataset, _codes


class RepresentationMap:
    """Per categorical column, groups of values denoting the same real-world value."""

    def __init__(self, groups: Mapping[str, Iterable[Iterable]] | None = None):
        self.groups: dict[str, list[tuple]] = {}
        for col, col_groups in (groups or {}).items():
            seen: set = set()
            out = []
            for g in col_groups:
                g = tuple(g)
                keys = {(type(v), v) for v in g}
                if keys & seen:
                    raise DataError(f"column {col!r}: representation groups overlap")
                seen |= keys
                out.append(g)
            self.groups[col] = out

    def get(self, column: str) -> list[tuple]:
        return self.groups.get(column, [])

    def to_dict(self) -> dict:
        return {col: [list(g) for g in gs] for col, gs in sorted(self.groups.items())}

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "RepresentationMap":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def __eq__(self, other):
        return isinstance(other, RepresentationMap) and self.to_dict() == other.to_dict()


def replacement_count(values, groups: Iterable[Iterable]) -> int:
    """Fewest cell rewrites that leave every group with a single representation.

    Per group the cheapest fix keeps the most frequent representation and
    rewrites the rest. Values a group lists but the column no longer holds
    count zero.
    """
    counts: dict = {}
    for v in np.asarray(values, dtype=object).tolist():
        key = (type(v), v)
        counts[key] = counts.get(key, 0) + 1
    total = 0
    for g in groups:
        sizes = [counts.get((type(v), v), 0) for v in g]
        if sizes:
            total += sum(sizes) - max(sizes)
    return total


def inconsistency(values, groups: Iterable[Iterable], kind: str = CATEGORICAL) -> float:
    if kind != CATEGORICAL or len(values) == 0:
        return 0.0
    return replacement_count(values, groups) / len(values)


def consistency(ds: Dataset, rep_map: RepresentationMap | None = None) -> float:
    rep_map = rep_map or RepresentationMap()
    feats = ds.features
    if not feats:
        return 1.0
    total = sum(replacement_count(ds[c.name], rep_map.get(c.name))
                for c in feats if c.kind == CATEGORICAL)
    return 1.0 - total / (len(feats) * ds.n)


def completeness(ds: Dataset) -> float:
    feats = ds.features
    if not feats:
        return 1.0
    missing = sum(int(c.is_missing(ds[c.name]).sum()) for c in feats)
    return 1.0 - missing / (len(feats) * ds.n)


def mismatch_count(values, gt_values) -> int:
    values, gt_values = list(values), list(gt_values)
    if len(values) != len(gt_values):
        raise DataError("column and ground truth differ in length")
    return sum(1 for a, b in zip(values, gt_values) if not (a == b and type(a) is type(b)))


def feature_accuracy_cat(values, gt_values) -> float:
    return 1.0 - mismatch_count(values, gt_values) / len(values)


def feature_accuracy_num(values, gt_values) -> float:
    """One minus mean absolute deviation, scaled by the ground-truth mean. Unclamped."""
    v = np.asarray(values, dtype=float)
    gt = np.asarray(gt_values, dtype=float)
    if v.shape != gt.shape:
        raise DataError("column and ground truth differ in length")
    mean_gt = gt.mean()
    if mean_gt == 0:
        raise DataError("ground-truth mean is zero; numerical accuracy is undefined")
    return float(1.0 - np.abs(gt - v).mean() / mean_gt)


@dataclass(frozen=True)
class FeatureAccuracy:
    categorical: float
    numerical: float
    combined: float


def feature_accuracy_report(pd: PairedDataset) -> FeatureAccuracy:
    cur, gt = pd.current, pd.ground_truth
    cat = [mismatch_count(cur[c.name], gt[c.name]) for c in cur.features if c.kind == CATEGORICAL]
    num = [feature_accuracy_num(cur[c.name], gt[c.name]) for c in cur.features if c.kind == NUMERICAL]
    # pooled counts keep the average exact: mean(1 - m_i/n) == 1 - sum(m_i)/(n * n_cat)
    c_acc = 1.0 - sum(cat) / (len(cat) * cur.n) if cat else 1.0
    n_acc = float(np.mean(num)) if num else 1.0
    present = ([c_acc] if cat else []) + ([n_acc] if num else [])
    combined = float(np.mean(present)) if present else 1.0
    return FeatureAccuracy(c_acc, n_acc, combined)


def target_accuracy(pd: PairedDataset) -> float:
    t = pd.current.target
    cur, gt = pd.current.target_values, pd.ground_truth.target_values
    if t.kind == NUMERICAL:
        return max(0.0, feature_accuracy_num(cur, gt))
    return feature_accuracy_cat(cur, gt)


def uniqueness(ds: Dataset) -> float:
    if ds.n < 2:
        raise DataError("uniqueness needs at least two rows")
    return (unique_row_count(ds) - 1) / (ds.n - 1)


def unique_row_indices(ds: Dataset) -> np.ndarray:
    """Index of the first occurrence of every distinct full row, ascending."""
    codes = np.empty((ds.n, len(ds.columns)), dtype=np.int64)
    for j, c in enumerate(ds.columns):
        if c.kind == NUMERICAL:
            _, codes[:, j] = np.unique(ds[c.name], return_inverse=True)
        else:
            codes[:, j] = _codes(ds[c.name])[1]
    _, first = np.unique(codes, axis=0, return_index=True)
    return np.sort(first)


def unique_row_count(ds: Dataset) -> int:
    return len(unique_row_indices(ds))


def _labels(ds_or_labels) -> np.ndarray:
    if isinstance(ds_or_labels, Dataset):
        if ds_or_labels.target.kind != CATEGORICAL:
            raise DataError("class balance needs a classified target")
        return ds_or_labels.target_values
    return np.asarray(ds_or_labels, dtype=object)


def imbalance(ds_or_labels) -> int:
    """Sum of absolute class-size differences over unordered class pairs."""
    _, codes = _codes(_labels(ds_or_labels))
    return imbalance_from_counts(np.bincount(codes))


def imbalance_from_counts(counts) -> int:
    c = np.sort(np.asarray(counts, dtype=np.int64))
    m = len(c)
    # sorted ascending, class k (1-based) is larger than k-1 others and smaller than m-k
    weights = 2 * np.arange(1, m + 1) - m - 1
    return int((c * weights).sum())


def worst_case_imbalance(m: int, n_cmax: int) -> int:
    return math.ceil(m / 2) * (m // 2) * int(n_cmax)


def balance(ds_or_labels) -> float:
    _, codes = _codes(_labels(ds_or_labels))
    counts = np.bincount(codes)
    m = len(counts)
    if m < 2:
        raise DataError("class balance needs at least two classes")
    eps = worst_case_imbalance(m, counts.max())
    return min(1.0, max(0.0, 1.0 - imbalance_from_counts(counts) / eps))


@dataclass
class QualityReport:
    consistency: float
    completeness: float
    cFAccuracy: float | None = None
    nFAccuracy: float | None = None
    featureAccuracy: float | None = None
    tAccuracy: float | None = None
    uniqueness: float | None = None
    balance: float | None = None
    imbalance: int | None = None
    epsilon: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def measure(ds: Dataset, ground_truth: Dataset | None = None,
            rep_map: RepresentationMap | None = None, labels=None) -> QualityReport:
    """Score every dimension that the inputs allow.

    Accuracy scores need ``ground_truth``; class balance needs a categorical
    target or explicit ``labels``.
    """
    rep = QualityReport(consistency(ds, rep_map), completeness(ds))
    if ground_truth is not None:
        pair = PairedDataset(ds, ground_truth)
        fa = feature_accuracy_report(pair)
        rep.cFAccuracy, rep.nFAccuracy, rep.featureAccuracy = fa.categorical, fa.numerical, fa.combined
        rep.tAccuracy = target_accuracy(pair)
    if ds.n >= 2:
        rep.uniqueness = uniqueness(ds)
    if labels is None and ds.target.kind == CATEGORICAL:
        labels = ds.target_values
    if labels is not None:
        _, codes = _codes(labels)
        counts = np.bincount(codes)
        rep.imbalance = imbalance_from_counts(counts)
        rep.epsilon = worst_case_imbalance(len(counts), counts.max())
        if len(counts) >= 2:
            rep.balance = balance(labels)
    return rep
