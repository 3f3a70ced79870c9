"""Stratified splits, pollution grids and the three pollution scenarios.

Scenario 1 pollutes the training split only, scenario 2 the test split only,
scenario 3 both (each side from its own random sub-stream).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polluters import (DIMENSIONS, ClassBalanceSpec, CompletenessSpec, ConsistencySpec,
                        DuplicateCount, FeatureAccuracySpec, Pollution, TargetAccuracySpec,
                        UniquenessSpec, pollute)
from .rng import RngStream
from .tabular import NUMERICAL, DataError, Dataset, _codes, class_labels, round_half_up

FRACTION_LEVELS = tuple(i / 10 for i in range(11))
DUPLICATION_FACTORS = tuple(Fraction(10, 10 - i) for i in range(9))  # uniqueness 1.0 .. 0.2
ROW_CHANGING = ("uniqueness", "class_balance")


def stratified_split(ds: Dataset, rng: RngStream, train_fraction: float = 0.8,
                     labels=None) -> tuple[Dataset, Dataset]:
    """Per class, ``round(train_fraction * n_cl)`` rows go to train, the rest to test."""
    labels = ds.target_values if labels is None else labels
    if labels is ds.target_values and ds.target.kind == NUMERICAL:
        raise DataError("stratified split needs class labels; discretize the target first")
    uniq, codes = _codes(labels)
    sizes = np.bincount(codes, minlength=len(uniq))
    if (sizes < 2).any():
        small = [uniq[i] for i in np.flatnonzero(sizes < 2)]
        raise DataError(f"classes with fewer than 2 rows cannot be split: {small}")
    n_train = np.array([min(max(round_half_up(train_fraction * s), 1), s - 1) for s in sizes])
    gap = round_half_up(train_fraction * ds.n) - int(n_train.sum())
    if gap:
        big = int(np.argmax(sizes))
        step = int(np.sign(gap))
        if 1 <= n_train[big] + step <= sizes[big] - 1:
            n_train[big] += step
    train_rows, test_rows = [], []
    for ci, cl in enumerate(uniq):
        members = np.flatnonzero(codes == ci)
        perm = rng.child(f"class:{cl}").permutation(len(members))
        train_rows.append(members[perm[:n_train[ci]]])
        test_rows.append(members[perm[n_train[ci]:]])
    return ds.take(np.sort(np.concatenate(train_rows))), ds.take(np.sort(np.concatenate(test_rows)))


def split_summary(train: Dataset, test: Dataset, seed: int, fraction: float, labels_train=None,
                  labels_test=None) -> dict:
    lt = train.target_values if labels_train is None else labels_train
    ls = test.target_values if labels_test is None else labels_test
    ut, ct = _codes(lt)
    us, cs = _codes(ls)
    return {
        "seed": seed,
        "train_fraction": fraction,
        "train_rows": train.n,
        "test_rows": test.n,
        "train_counts": {str(k): int(v) for k, v in zip(ut, np.bincount(ct))},
        "test_counts": {str(k): int(v) for k, v in zip(us, np.bincount(cs))},
    }


def quality_grid(dimension: str, duplicate_counts=(DuplicateCount(),),
                 consistency_k=(2, 5)) -> list:
    """Pollution parameter records for one dimension, in increasing pollution."""
    if dimension == "consistency":
        return [ConsistencySpec(lam, k) for k in consistency_k for lam in FRACTION_LEVELS]
    if dimension == "completeness":
        return [CompletenessSpec(lam) for lam in FRACTION_LEVELS]
    if dimension == "feature_accuracy":
        return [FeatureAccuracySpec(lam) for lam in FRACTION_LEVELS]
    if dimension == "target_accuracy":
        return [TargetAccuracySpec(lam) for lam in FRACTION_LEVELS]
    if dimension == "uniqueness":
        return [UniquenessSpec(rho, dist) for dist in duplicate_counts for rho in DUPLICATION_FACTORS]
    if dimension == "class_balance":
        return [ClassBalanceSpec(lam) for lam in FRACTION_LEVELS]
    raise DataError(f"unknown dimension {dimension!r}; expected one of {DIMENSIONS}")


@dataclass
class ScenarioRun:
    scenario: int
    dimension: str
    spec: object
    train: Dataset
    test: Dataset
    clean_train: Dataset
    clean_test: Dataset
    train_pollution: Pollution | None = None
    test_pollution: Pollution | None = None
    seed_index: int = 0

    @property
    def level(self) -> float:
        return self.spec.level


def _labels_for(ds: Dataset, spec, bin_step):
    if spec.dimension in ROW_CHANGING and ds.target.kind == NUMERICAL:
        return class_labels(ds, bin_step)
    return None


def build_scenario(scenario: int, clean_train: Dataset, clean_test: Dataset, spec, rng: RngStream,
                   bin_step: float | None = None, seed_index: int = 0) -> ScenarioRun:
    if scenario not in (1, 2, 3):
        raise DataError(f"unknown scenario {scenario!r}")
    run = ScenarioRun(scenario, spec.dimension, spec, clean_train, clean_test,
                      clean_train, clean_test, seed_index=seed_index)
    if scenario in (1, 3):
        p = pollute(clean_train, spec, rng.child("train"), _labels_for(clean_train, spec, bin_step))
        run.train, run.train_pollution = p.dataset, p
    if scenario in (2, 3):
        p = pollute(clean_test, spec, rng.child("test"), _labels_for(clean_test, spec, bin_step))
        run.test, run.test_pollution = p.dataset, p
    return run


def build_clustering_run(ds: Dataset, spec, rng: RngStream, bin_step: float | None = None,
                         seed_index: int = 0) -> ScenarioRun:
    """Clustering has no split: the whole dataset is polluted once and used on both sides."""
    p = pollute(ds, spec, rng.child("full"), _labels_for(ds, spec, bin_step))
    return ScenarioRun(3, spec.dimension, spec, p.dataset, p.dataset, ds, ds, p, p, seed_index)
