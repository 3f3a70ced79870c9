"""Seeded polluters, one per quality dimension.

Every polluter takes a dataset, a parameter record and an :class:`RngStream`
and returns a :class:`Pollution` holding the new dataset and a cell log.
Fraction-based polluters pick rows as prefixes of one fixed permutation per
feature, so the cells polluted at a lower level are a subset of those
polluted at a higher level under the same seed.
"""
from __future__ import annotations

import functools
import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from .quality import RepresentationMap, imbalance_from_counts, unique_row_indices
from .rng import RngStream
from .tabular import (CATEGORICAL, NUMERICAL, ColumnMeta, DataError, Dataset, _codes,
                      round_half_up, value_sort_key)

log = logging.getLogger(__name__)

DIMENSIONS = ("consistency", "completeness", "feature_accuracy", "target_accuracy",
              "uniqueness", "class_balance")


@dataclass
class Pollution:
    dataset: Dataset
    log: list[tuple[int, str, Any, Any]] = field(default_factory=list)
    rep_map: RepresentationMap | None = None
    plan: "BalancePlan | None" = None

    def log_records(self) -> list[dict]:
        return [{"row": r, "column": c, "old": o, "new": v} for r, c, o, v in self.log]


# -- parameter records --------------------------------------------------------

def _level_for(level, name: str) -> float:
    if isinstance(level, Mapping):
        return float(level.get(name, 0.0))
    return float(level)


def _check_fraction(x: float, what: str) -> None:
    if not 0.0 <= x <= 1.0:
        raise DataError(f"{what} must lie in [0, 1], got {x}")


@dataclass(frozen=True)
class ConsistencySpec:
    fraction: float | Mapping[str, float]
    k: int = 2
    dimension = "consistency"

    @property
    def level(self) -> float:
        return float(self.fraction) if not isinstance(self.fraction, Mapping) else float("nan")

    @property
    def variant(self) -> str:
        return f"k={self.k}"


@dataclass(frozen=True)
class CompletenessSpec:
    fraction: float | Mapping[str, float]
    dimension = "completeness"

    @property
    def level(self) -> float:
        return float(self.fraction) if not isinstance(self.fraction, Mapping) else float("nan")

    variant = ""


@dataclass(frozen=True)
class FeatureAccuracySpec:
    """``level`` is a cell fraction for categorical features and the noise
    variance for numerical ones."""
    fraction: float | Mapping[str, float]
    dimension = "feature_accuracy"

    @property
    def level(self) -> float:
        return float(self.fraction) if not isinstance(self.fraction, Mapping) else float("nan")

    variant = ""


@dataclass(frozen=True)
class TargetAccuracySpec:
    fraction: float
    dimension = "target_accuracy"

    @property
    def level(self) -> float:
        return float(self.fraction)

    variant = ""


@dataclass(frozen=True)
class DuplicateCount:
    """Distribution of how many copies to append per selected row."""
    kind: str = "one"
    a: float = 1.0
    b: float = 1.0

    def draw(self, rng: RngStream) -> int:
        if self.kind == "one":
            return 1
        if self.kind == "uniform":
            return int(rng.integers(int(self.a), int(self.b) + 1))
        if self.kind == "normal":
            return int(np.rint(rng.normal(self.a, self.b)))
        if self.kind == "zipf":
            return int(rng.generator.zipf(self.a))
        raise DataError(f"unknown duplicate-count distribution {self.kind!r}")


@dataclass(frozen=True)
class UniquenessSpec:
    rho: float | Fraction
    counts: DuplicateCount = DuplicateCount()
    dimension = "uniqueness"

    @property
    def level(self) -> float:
        return float(self.rho)

    @property
    def variant(self) -> str:
        return "" if self.counts.kind == "one" else self.counts.kind


@dataclass(frozen=True)
class ClassBalanceSpec:
    degree: float
    n_total: int | None = None
    dimension = "class_balance"

    @property
    def level(self) -> float:
        return float(self.degree)

    variant = ""


# -- consistent representation -----------------------------------------------

def fresh_representations(domain, k: int, placeholder=None) -> dict:
    """``k - 1`` new, unused representations for every value of ``domain``."""
    taken = {(type(v), v) for v in domain}
    if placeholder is not None:
        taken.add((type(placeholder), placeholder))
    out = {}
    ints = [v for v in domain if isinstance(v, (int, np.integer)) and not isinstance(v, bool)]
    next_int = (max(ints) + 1) if ints else 0
    for v in domain:
        reps = []
        if isinstance(v, str):
            i = 1
            while len(reps) < k - 1:
                cand = f"{v}{i}"
                if (str, cand) not in taken:
                    reps.append(cand)
                    taken.add((str, cand))
                i += 1
        else:
            while len(reps) < k - 1:
                if (int, next_int) not in taken:
                    reps.append(next_int)
                    taken.add((int, next_int))
                next_int += 1
        out[(type(v), v)] = reps
    return out


def pollute_consistent_representation(ds: Dataset, spec: ConsistencySpec, rng: RngStream) -> Pollution:
    if spec.k < 2:
        raise DataError("k must be at least 2")
    cats = [c for c in ds.features if c.kind == CATEGORICAL]
    if not cats:
        raise DataError("consistency pollution needs at least one categorical feature")
    out, entries, groups = ds, [], {}
    for c in cats:
        lam = _level_for(spec.fraction, c.name)
        _check_fraction(lam, "consistency fraction")
        domain = ds.domain(c.name)
        reps = fresh_representations(domain, spec.k, c.placeholder)
        sub = rng.child(f"feature:{c.name}")
        order = sub.permutation(ds.n)
        picks = sub.child("representation").integers(0, spec.k - 1, size=ds.n)
        values = ds[c.name].tolist()
        missing = c.is_missing(ds[c.name])
        used: dict = {}
        for row in order[:round_half_up(lam * ds.n)].tolist():
            if missing[row]:
                continue
            v = values[row]
            new = reps[(type(v), v)][picks[row]]
            values[row] = new
            used.setdefault((type(v), v), set()).add((type(new), new))
            entries.append((row, c.name, v, new))
        col_groups = []
        for v in domain:
            present = [r for r in reps[(type(v), v)] if (type(r), r) in used.get((type(v), v), ())]
            col_groups.append((v, *present))
        groups[c.name] = col_groups
        out = out.with_column(c.name, values)
    return Pollution(out, entries, RepresentationMap(groups))


# -- completeness ---------------------------------------------------------------

def pollute_completeness(ds: Dataset, spec: CompletenessSpec, rng: RngStream) -> Pollution:
    """Top up each feature's placeholders to ``round(fraction * n)`` cells, MCAR."""
    out, entries = ds, []
    for c in ds.features:
        if c.kind not in (CATEGORICAL, NUMERICAL):
            continue
        lam = _level_for(spec.fraction, c.name)
        _check_fraction(lam, "completeness fraction")
        wanted = round_half_up(lam * ds.n)
        missing = c.is_missing(ds[c.name])
        have = int(missing.sum())
        if wanted < have:
            raise DataError(f"column {c.name!r} already has {have} missing cells; "
                            f"cannot reduce to {wanted}")
        if wanted == have:
            continue
        if c.placeholder is None:
            raise DataError(f"column {c.name!r} declares no placeholder")
        order = rng.child(f"feature:{c.name}").permutation(ds.n)
        chosen = order[~missing[order]][:wanted - have]
        values = ds[c.name].tolist()
        ph = float(c.placeholder) if c.kind == NUMERICAL else c.placeholder
        for row in chosen.tolist():
            entries.append((row, c.name, values[row], ph))
            values[row] = ph
        out = out.with_column(c.name, values)
    return Pollution(out, entries)


# -- feature / target accuracy ----------------------------------------------

def _flip_categories(ds: Dataset, c: ColumnMeta, lam: float, rng: RngStream, entries: list) -> list:
    _check_fraction(lam, f"accuracy fraction for {c.name!r}")
    values = ds[c.name].tolist()
    count = round_half_up(lam * ds.n)
    if count == 0:
        return values
    domain = ds.domain(c.name)
    if len(domain) < 2:
        raise DataError(f"column {c.name!r} has a single category; no different value exists")
    index = {(type(v), v): i for i, v in enumerate(domain)}
    order = rng.permutation(ds.n)
    draws = rng.child("category").integers(0, len(domain) - 1, size=ds.n)
    for row in order[:count].tolist():
        old = values[row]
        i = index.get((type(old), old))
        r = int(draws[row])
        if i is None:
            # placeholder cell: any domain value differs from it
            new = domain[r]
        else:
            new = domain[r if r < i else r + 1]
        values[row] = new
        entries.append((row, c.name, old, new))
    return values


def _add_noise(ds: Dataset, c: ColumnMeta, variance: float, rng: RngStream, entries: list) -> np.ndarray:
    if variance < 0:
        raise DataError("noise variance must be non-negative")
    values = np.array(ds[c.name], dtype=float)
    if variance == 0:
        return values
    missing = c.is_missing(values)
    mean_gt = values[~missing].mean() if (~missing).any() else 0.0
    z = rng.normal(0.0, 1.0, size=ds.n)
    noisy = values + z * math.sqrt(variance) * mean_gt
    noisy[missing] = values[missing]
    for row in np.flatnonzero(~missing).tolist():
        entries.append((row, c.name, float(values[row]), float(noisy[row])))
    return noisy


def pollute_feature_accuracy(ds: Dataset, spec: FeatureAccuracySpec, rng: RngStream) -> Pollution:
    out, entries = ds, []
    for c in ds.features:
        lam = _level_for(spec.fraction, c.name)
        sub = rng.child(f"feature:{c.name}")
        if c.kind == CATEGORICAL:
            out = out.with_column(c.name, _flip_categories(ds, c, lam, sub, entries))
        elif c.kind == NUMERICAL:
            out = out.with_column(c.name, _add_noise(ds, c, lam, sub, entries))
    return Pollution(out, entries)


def pollute_target_accuracy(ds: Dataset, spec: TargetAccuracySpec, rng: RngStream) -> Pollution:
    t, entries = ds.target, []
    sub = rng.child(f"target:{t.name}")
    if t.kind == CATEGORICAL:
        values = _flip_categories(ds, t, float(spec.fraction), sub, entries)
    else:
        values = _add_noise(ds, t, float(spec.fraction), sub, entries)
    return Pollution(ds.with_column(t.name, values), entries)


# -- uniqueness --------------------------------------------------------------

def pollute_uniqueness(ds: Dataset, spec: UniquenessSpec, rng: RngStream, labels=None) -> Pollution:
    """Deduplicate, then append ``round((rho - 1) * n_cl)`` exact copies per class.

    ``labels`` overrides the target as the class assignment.
    """
    rho = spec.rho
    if rho < 1:
        raise DataError("duplication factor must be at least 1")
    keep = unique_row_indices(ds)
    base = ds.take(keep)
    cls = np.asarray(labels, dtype=object)[keep] if labels is not None else base.target_values
    uniq, codes = _codes(cls)
    rows = [keep]
    entries = []
    for ci, cl in enumerate(uniq):
        members = np.flatnonzero(codes == ci)
        if len(members) == 0:
            raise DataError(f"class {cl!r} is empty after deduplication")
        budget = round_half_up(float((rho - 1) * len(members)))
        sub = rng.child(f"class:{cl}")
        pick_rng, count_rng = sub.child("row"), sub.child("count")
        added = []
        while budget > 0:
            local = int(members[pick_rng.integers(0, len(members))])
            x = min(max(spec.counts.draw(count_rng), 1), budget)
            added.extend([local] * x)
            budget -= x
        for local in added:
            entries.append((int(keep[local]), "*", None, "duplicate"))
        rows.append(keep[np.asarray(added, dtype=np.intp)] if added else keep[:0])
    out = ds.take(np.concatenate(rows))
    return Pollution(out, entries)


# -- class balance -----------------------------------------------------------

@dataclass(frozen=True)
class BalancePlan:
    degree: float            # requested
    degree_effective: float  # after the s_min cap
    degree_cap: float
    n_total: int
    m: int
    delta: float
    order: tuple             # class ids, largest source class first
    counts: dict             # class id -> planned rows
    s_max: int
    s_min: int

    @property
    def imbalance(self) -> int:
        return imbalance_from_counts(list(self.counts.values()))

    def recovered_degree(self) -> float:
        return self.imbalance / ((self.m + 1) / 3 * self.n_total)


def _class_order(labels) -> tuple[list, np.ndarray, np.ndarray]:
    uniq, codes = _codes(labels)
    sizes = np.bincount(codes, minlength=len(uniq))
    order = sorted(range(len(uniq)), key=lambda i: (-sizes[i], value_sort_key(uniq[i])))
    return [uniq[i] for i in order], sizes[order], codes


def _progression(n_total: int, m: int, degree: float) -> np.ndarray:
    delta = 2.0 * degree * n_total / (m * (m - 1))
    pos = np.arange(1, m + 1) - (m + 1) / 2.0
    return n_total / m + pos * delta


def _round_counts(real: np.ndarray, n_total: int) -> np.ndarray:
    """Integer counts within one row of ``real`` summing to ``n_total``.

    Among the admissible roundings, the one whose imbalance is closest to the
    real-valued progression's wins; ties favour giving rows to larger classes.
    """
    base = np.floor(real + 1e-9).astype(np.int64)
    rest = n_total - int(base.sum())
    m = len(real)
    weights = 2 * np.arange(1, m + 1) - m - 1
    exact = float((real * weights).sum())
    if rest == 0:
        return base
    if math.comb(m, rest) > 20000:
        frac = real - base
        rank = sorted(range(m), key=lambda j: (-round(frac[j], 9), -j))
        base[rank[:rest]] += 1
        return base
    best, best_key = None, None
    for combo in itertools.combinations(range(m), rest):
        cand = base.copy()
        cand[list(combo)] += 1
        if (np.diff(cand) < 0).any():
            continue
        key = (round(abs(float((cand * weights).sum()) - exact), 9),
               round(float(((cand - real) ** 2).sum()), 9),
               tuple(-j for j in reversed(combo)))
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best if best is not None else base + np.isin(np.arange(m), np.arange(m - rest, m))


def degree_cap(n_total: int, m: int) -> float:
    """Largest degree whose smallest class still holds ceil(1% of the largest).

    With ``a = n_total / m`` the progression's extremes are ``a(1 - d)`` and
    ``a(1 + d)``. A smallest count ``s`` is admissible iff some integer ``t``
    has ``s >= t`` and ``s >= 2a - 100t``, so the least admissible ``s`` is
    the minimum of ``max(t, 2a - 100t)`` over integers ``t``.
    """
    a = n_total / m
    t0 = math.floor(2 * a / 101)
    s_least = min(max(t, 2 * a - 100 * t) for t in (t0, t0 + 1))
    return min(1.0, max(0.0, 1.0 - s_least / a))


def plan_class_balance(ds_or_labels, degree: float, n_total: int | None = None) -> BalancePlan:
    """Per-class target counts forming an arithmetic progression around ``n_total / m``.

    Classes are ordered by source size descending (ties: ascending id); the
    first half of that order shrinks, the second half grows, and with odd
    ``m`` the middle class keeps ``n_total / m`` rows.
    """
    labels = ds_or_labels.target_values if isinstance(ds_or_labels, Dataset) else ds_or_labels
    _check_fraction(degree, "class-balance degree")
    order, sizes, _ = _class_order(labels)
    m = len(order)
    if m < 2:
        raise DataError("class balance pollution needs at least two classes")
    if n_total is None:
        n_total = default_sample_count(labels)
    if n_total % m:
        smaller = n_total - n_total % m
        warnings.warn(f"sample count {n_total} is not a multiple of {m}; using {smaller}")
        n_total = smaller
    if n_total < m:
        raise DataError("sample count too small for the number of classes")
    cap = degree_cap(n_total, m)
    eff = min(degree, cap)
    counts = _round_counts(_progression(n_total, m, eff), n_total)
    short = [(cl, int(c), int(s)) for cl, c, s in zip(order, counts, sizes) if c > s]
    if short:
        raise DataError("infeasible class-balance plan: " + ", ".join(
            f"class {cl!r} needs {c} rows but has {s}" for cl, c, s in short))
    return BalancePlan(
        degree=float(degree), degree_effective=float(eff), degree_cap=float(cap),
        n_total=int(n_total), m=m, delta=2.0 * eff * n_total / (m * (m - 1)),
        order=tuple(order), counts={cl: int(c) for cl, c in zip(order, counts)},
        s_max=int(counts.max()), s_min=math.ceil(0.01 * counts.max() - 1e-9),
    )


def default_sample_count(labels) -> int:
    """Largest multiple of ``m`` for which both the balanced and the most
    imbalanced plan can be drawn from the source rows."""
    _, sizes, _ = _class_order(labels)
    return _default_sample_count(tuple(int(s) for s in sizes))


@functools.lru_cache(maxsize=256)
def _default_sample_count(sizes: tuple) -> int:
    sizes = np.asarray(sizes)
    m = len(sizes)
    n_total = m * int(sizes.min())
    while n_total >= m:
        ok = True
        for d in (0.0, degree_cap(n_total, m)):
            counts = _round_counts(_progression(n_total, m, d), n_total)
            if (counts > sizes).any():
                ok = False
                break
        if ok:
            return n_total
        n_total -= m
    raise DataError("no feasible sample count for class-balance pollution")


def pollute_class_balance(ds: Dataset, plan: BalancePlan, rng: RngStream, labels=None) -> Pollution:
    labels = ds.target_values if labels is None else np.asarray(labels, dtype=object)
    uniq, codes = _codes(labels)
    picked = []
    for ci, cl in enumerate(uniq):
        want = plan.counts.get(cl, 0)
        members = np.flatnonzero(codes == ci)
        if want > len(members):
            raise DataError(f"infeasible plan: class {cl!r} needs {want} rows but has {len(members)}")
        order = rng.child(f"class:{cl}").permutation(len(members))
        picked.append(members[np.sort(order[:want])])
    rows = np.concatenate(picked)
    rows = rows[rng.child("shuffle").permutation(len(rows))]
    return Pollution(ds.take(rows), [], plan=plan)


# -- dispatch ----------------------------------------------------------------

def pollute(ds: Dataset, spec, rng: RngStream, labels=None) -> Pollution:
    """Apply any polluter given its parameter record."""
    if isinstance(spec, ConsistencySpec):
        return pollute_consistent_representation(ds, spec, rng)
    if isinstance(spec, CompletenessSpec):
        return pollute_completeness(ds, spec, rng)
    if isinstance(spec, FeatureAccuracySpec):
        return pollute_feature_accuracy(ds, spec, rng)
    if isinstance(spec, TargetAccuracySpec):
        return pollute_target_accuracy(ds, spec, rng)
    if isinstance(spec, UniquenessSpec):
        return pollute_uniqueness(ds, spec, rng, labels)
    if isinstance(spec, ClassBalanceSpec):
        lab = ds.target_values if labels is None else labels
        plan = plan_class_balance(lab, spec.degree, spec.n_total)
        return pollute_class_balance(ds, plan, rng, labels)
    raise TypeError(f"not a pollution spec: {spec!r}")
