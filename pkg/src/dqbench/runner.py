"""Experiment grid: dimensions x scenarios x levels x seeds x algorithms."""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import models
from .polluters import DIMENSIONS, DuplicateCount, Pollution, UniquenessSpec
from .quality import (balance, completeness, consistency, feature_accuracy_report,
                      target_accuracy, uniqueness)
from .report import RESULT_FIELDS, ResultRecord, emit_report, write_runs
from .rng import derive_rng
from .scenarios import (FRACTION_LEVELS, ScenarioRun, build_clustering_run, build_scenario,
                        quality_grid, split_summary, stratified_split)
from .scoring import adjusted_mutual_information, macro_f1, r2
from .tabular import (CATEGORICAL, NUMERICAL, DataError, Dataset, DatasetManifest, PairedDataset,
                      class_labels, drop_small_classes, load_csv, one_hot_encode, save_csv)

log = logging.getLogger(__name__)

TASKS = ("classification", "regression", "clustering")
DEFAULT_ALGORITHMS = {
    "classification": ["knn", "cart", "majority", "class_ratio"],
    "regression": ["ridge", "cart", "mean"],
    "clustering": ["kmeans"],
}
DEFAULT_HYPERPARAMETERS = {
    "knn": {"k": 5},
    "cart": {"max_depth": 8, "min_leaf": 5},
    "ridge": {"alpha": 1.0},
    "kmeans": {"n_init": 5, "max_iter": 100},
}
METRIC = {"classification": "macro_f1", "regression": "r2", "clustering": "ami"}


@dataclass
class ExperimentConfig:
    dataset: str | None = None
    manifest: str | None = None
    task: str = "classification"
    name: str | None = None
    dimensions: list[str] = field(default_factory=lambda: list(DIMENSIONS))
    scenarios: list[int] = field(default_factory=lambda: [1, 2, 3])
    algorithms: list[str] | None = None
    hyperparameters: dict[str, dict] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    train_fraction: float = 0.8
    consistency_k: list[int] = field(default_factory=lambda: [2, 5])
    duplicate_counts: list[dict] = field(default_factory=lambda: [{"kind": "one"}])
    levels: dict[str, list] = field(default_factory=dict)
    bin_step: float | None = None
    min_class_count: int = 10
    out: str = "results"
    threads: int = 1
    keep_intermediate: bool = False

    def __post_init__(self):
        if self.task not in TASKS:
            raise DataError(f"unknown task {self.task!r}; expected one of {TASKS}")
        unknown = [d for d in self.dimensions if d not in DIMENSIONS]
        if unknown:
            raise DataError(f"unknown dimensions: {unknown}")
        if any(s not in (1, 2, 3) for s in self.scenarios):
            raise DataError("scenarios must be drawn from 1, 2, 3")
        if self.algorithms is None:
            self.algorithms = list(DEFAULT_ALGORITHMS[self.task])
        allowed = set(DEFAULT_ALGORITHMS[self.task])
        bad = [a for a in self.algorithms if a not in allowed]
        if bad:
            raise DataError(f"algorithms {bad} do not apply to task {self.task!r}")
        if not self.seeds:
            raise DataError("at least one seed is required")

    @classmethod
    def from_dict(cls, raw: dict, base: Path | None = None) -> "ExperimentConfig":
        raw = dict(raw)
        known = set(cls.__dataclass_fields__)
        extra = set(raw) - known
        if extra:
            raise DataError(f"unknown config keys: {sorted(extra)}")
        for key in ("dataset", "manifest"):
            if raw.get(key) and base is not None and not Path(raw[key]).is_absolute():
                raw[key] = str((base / raw[key]).resolve())
        return cls(**raw)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh), path.parent)

    def hp(self, algorithm: str) -> dict:
        out = dict(DEFAULT_HYPERPARAMETERS.get(algorithm, {}))
        out.update(self.hyperparameters.get(algorithm, {}))
        return out


@dataclass(frozen=True)
class Cell:
    dimension: str
    label: str          # dimension plus variant, e.g. "consistency[k=2]"
    level_index: int
    scenario: int
    seed: int


@dataclass
class RunRecord:
    dataset: str
    dimension: str
    scenario: int
    algorithm: str
    level: float
    seed: int
    quality: float
    metric: str
    value: float


# -- helpers ------------------------------------------------------------------

def _label(spec) -> str:
    v = spec.variant
    return f"{spec.dimension}[{v}]" if v else spec.dimension


def _grid(cfg: ExperimentConfig, dimension: str) -> list:
    dup = tuple(DuplicateCount(**d) for d in cfg.duplicate_counts)
    specs = quality_grid(dimension, duplicate_counts=dup, consistency_k=tuple(cfg.consistency_k))
    if dimension in cfg.levels:
        wanted = [float(x) for x in cfg.levels[dimension]]
        specs = [s for s in specs if any(math.isclose(s.level, w, abs_tol=1e-9) for w in wanted)]
    return specs


def side_quality(dimension: str, polluted: Dataset, clean: Dataset, pollution: Pollution | None,
                 bin_step: float | None) -> float:
    """Measured quality of one (possibly unpolluted) side along ``dimension``."""
    if dimension == "consistency":
        return consistency(polluted, pollution.rep_map if pollution else None)
    if dimension == "completeness":
        return completeness(polluted)
    if dimension == "feature_accuracy":
        return feature_accuracy_report(PairedDataset(polluted, clean)).combined
    if dimension == "target_accuracy":
        return target_accuracy(PairedDataset(polluted, clean))
    if dimension == "uniqueness":
        return uniqueness(polluted)
    if dimension == "class_balance":
        return balance(class_labels(polluted, bin_step))
    raise DataError(f"unknown dimension {dimension!r}")


def scenario_quality(run: ScenarioRun, bin_step) -> float:
    train_q = side_quality(run.dimension, run.train, run.clean_train, run.train_pollution, bin_step)
    if run.train is run.test:
        return train_q
    test_q = side_quality(run.dimension, run.test, run.clean_test, run.test_pollution, bin_step)
    if run.scenario == 1:
        return train_q
    if run.scenario == 2:
        return test_q
    return 0.5 * (train_q + test_q)


def _model(algorithm: str, task: str, hp: dict, seed: int, n_clusters: int | None = None):
    rng = derive_rng(seed, ["model", algorithm])
    if algorithm == "knn":
        return models.KNNClassifier(**hp)
    if algorithm == "cart":
        return models.DecisionTree("classify" if task == "classification" else "regress", **hp)
    if algorithm == "majority":
        return models.MajorityClassifier()
    if algorithm == "class_ratio":
        return models.ClassRatioClassifier(rng)
    if algorithm == "ridge":
        return models.RidgeRegression(**hp)
    if algorithm == "mean":
        return models.MeanRegressor()
    raise DataError(f"unknown algorithm {algorithm!r}")


def encode(run: ScenarioRun) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrices for both sides; the column layout is fitted on train."""
    X_train, cmap = one_hot_encode(run.train)
    if run.test is run.train:
        return X_train, X_train
    return X_train, one_hot_encode(run.test, cmap)[0]


def evaluate(run: ScenarioRun, task: str, algorithm: str, hp: dict, seed: int,
             n_clusters: int | None = None, encoded=None) -> float:
    X_train, X_test = encoded if encoded is not None else encode(run)
    if task == "clustering":
        res = models.kmeans_cluster(X_test, n_clusters, derive_rng(seed, ["model", algorithm]), **hp)
        return adjusted_mutual_information(run.test.target_values, res.labels)
    model = _model(algorithm, task, hp, seed).fit(X_train, run.train.target_values)
    pred = model.predict(X_test)
    if task == "classification":
        return macro_f1(run.test.target_values, pred)
    return r2(run.test.target_values, pred)


# -- runner -------------------------------------------------------------------

class Experiment:
    """Prepared state shared read-only by every cell of one experiment."""

    def __init__(self, cfg: ExperimentConfig, dataset: Dataset | None = None,
                 manifest: DatasetManifest | None = None):
        self.cfg = cfg
        if dataset is None:
            if not (cfg.dataset and cfg.manifest):
                raise DataError("config needs 'dataset' and 'manifest' paths")
            manifest = DatasetManifest.load(cfg.manifest)
            dataset = load_csv(cfg.dataset, manifest)
        self.dataset = dataset
        self.name = cfg.name or (manifest.name if manifest else "dataset")
        self.bin_step = cfg.bin_step if cfg.bin_step is not None else (manifest.bin_step if manifest else None)
        t = dataset.target
        if cfg.task in ("classification", "clustering") and t.kind != CATEGORICAL:
            raise DataError(f"task {cfg.task!r} needs a categorical target")
        if cfg.task == "regression":
            if t.kind != NUMERICAL:
                raise DataError("regression needs a numerical target")
            if self.bin_step is None:
                raise DataError("regression needs a bin_step to stratify and group classes")
        self.dimensions = []
        for d in cfg.dimensions:
            if d == "consistency" and not any(c.kind == CATEGORICAL for c in dataset.features):
                log.info("skipping consistency: %s has no categorical features", self.name)
                continue
            self.dimensions.append(d)
        self.grids = {d: _grid(cfg, d) for d in self.dimensions}
        self._splits: dict = {}
        self._base: dict = {}
        for d in self.dimensions:
            base = self.base_dataset(d)
            if cfg.task == "clustering":
                continue
            for seed in cfg.seeds:
                key = (self._base_key(d), seed)
                if key not in self._splits:
                    labels = class_labels(base, self.bin_step)
                    self._splits[key] = stratified_split(base, derive_rng(seed, ["split"]),
                                                         cfg.train_fraction, labels)
        self.n_clusters = len(set(dataset.target_values.tolist())) if cfg.task == "clustering" else None

    def _base_key(self, dimension: str) -> str:
        return "reduced" if (dimension == "class_balance" and self.cfg.task == "regression") else "full"

    def base_dataset(self, dimension: str) -> Dataset:
        key = self._base_key(dimension)
        if key not in self._base:
            ds = self.dataset
            if key == "reduced":
                ds = drop_small_classes(ds, self.cfg.min_class_count, class_labels(ds, self.bin_step))
            self._base[key] = ds
        return self._base[key]

    def split(self, dimension: str, seed: int) -> tuple[Dataset, Dataset]:
        return self._splits[(self._base_key(dimension), seed)]

    def cells(self) -> list[Cell]:
        out = []
        scenarios = [3] if self.cfg.task == "clustering" else self.cfg.scenarios
        for d in self.dimensions:
            for li, spec in enumerate(self.grids[d]):
                for s in scenarios:
                    for seed in self.cfg.seeds:
                        out.append(Cell(d, _label(spec), li, s, seed))
        return out

    def build(self, cell: Cell) -> ScenarioRun:
        spec = self.grids[cell.dimension][cell.level_index]
        rng = derive_rng(cell.seed, ["pollute", cell.label])
        if self.cfg.task == "clustering":
            return build_clustering_run(self.base_dataset(cell.dimension), spec, rng, self.bin_step,
                                        cell.seed)
        train, test = self.split(cell.dimension, cell.seed)
        return build_scenario(cell.scenario, train, test, spec, rng, self.bin_step, cell.seed)

    def run_cell(self, cell: Cell) -> tuple[list[RunRecord], str | None]:
        try:
            run = self.build(cell)
            q = scenario_quality(run, self.bin_step)
            out = []
            encoded = encode(run)
            for algo in self.cfg.algorithms:
                value = evaluate(run, self.cfg.task, algo, self.cfg.hp(algo), cell.seed,
                                 self.n_clusters, encoded)
                out.append(RunRecord(self.name, cell.label, cell.scenario, algo, run.level,
                                     cell.seed, q, METRIC[self.cfg.task], value))
            if self.cfg.keep_intermediate:
                self._keep(cell, run)
            return out, None
        except Exception as exc:  # a failing cell must not sink the grid
            msg = f"{cell}: {type(exc).__name__}: {exc}"
            log.warning("cell failed: %s", msg)
            return [], msg

    def _keep(self, cell: Cell, run: ScenarioRun) -> None:
        d = (Path(self.cfg.out) / "cells" / cell.label / f"s{cell.scenario}"
             / f"level-{cell.level_index:02d}" / f"seed-{cell.seed}")
        d.mkdir(parents=True, exist_ok=True)
        save_csv(run.train, d / "train.csv")
        if run.test is not run.train:
            save_csv(run.test, d / "test.csv")
        for side, p in (("train", run.train_pollution), ("test", run.test_pollution)):
            if p is None or (side == "test" and p is run.train_pollution):
                continue
            write_pollution_log(p, d / f"pollution_{side}.jsonl")
            if p.rep_map is not None:
                p.rep_map.save(d / f"representation_map_{side}.json")


def write_pollution_log(p: Pollution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in p.log_records():
            fh.write(json.dumps(rec, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return str(x)


def aggregate(runs: list[RunRecord], algorithms: list[str]) -> list[ResultRecord]:
    groups: dict[tuple, list[RunRecord]] = {}
    for r in runs:
        groups.setdefault((r.dataset, r.dimension, r.scenario, r.algorithm, r.level), []).append(r)
    out = []
    for (ds, dim, sc, algo, level), rs in groups.items():
        rs = sorted(rs, key=lambda r: r.seed)
        vals = np.array([r.value for r in rs])
        out.append(ResultRecord(ds, dim, sc, algo, float(level),
                                float(np.mean([r.quality for r in rs])), rs[0].metric,
                                float(vals.mean()), float(vals.std()), len(rs)))
    return sort_records(out, algorithms)


def sort_records(records: list[ResultRecord], algorithms: list[str] | None = None) -> list[ResultRecord]:
    dim_rank = {d: i for i, d in enumerate(DIMENSIONS)}
    algo_rank = {a: i for i, a in enumerate(algorithms or [])}
    return sorted(records, key=lambda r: (r.dataset, dim_rank.get(r.dimension.split("[")[0], 99),
                                          r.dimension, r.scenario,
                                          algo_rank.get(r.algorithm, 99), r.algorithm, r.level))


@dataclass
class ExperimentResult:
    records: list[ResultRecord]
    runs: list[RunRecord]
    failures: list[str]


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None,
                   manifest: DatasetManifest | None = None, write: bool = True) -> ExperimentResult:
    """Run every cell of the grid and aggregate per-seed metrics.

    Cells are independent; ``cfg.threads`` only changes wall time. Results are
    sorted canonically before they are returned or written.
    """
    exp = Experiment(cfg, dataset, manifest)
    cells = exp.cells()
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(exp.run_cell, cells))
    else:
        outcomes = [exp.run_cell(c) for c in cells]
    runs = [r for recs, _ in outcomes for r in recs]
    failures = [msg for _, msg in outcomes if msg]
    runs.sort(key=lambda r: (r.dimension, r.scenario, r.algorithm, r.level, r.seed))
    result = ExperimentResult(aggregate(runs, cfg.algorithms), runs, failures)
    if write:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        emit_report(result.records, out)
        write_runs(runs, out / "runs.csv")
        with open(out / "failures.json", "w", encoding="utf-8") as fh:
            json.dump(failures, fh, indent=2)
            fh.write("\n")
        split_dir = out / "splits"
        split_dir.mkdir(exist_ok=True)
        for (key, seed), (train, test) in sorted(exp._splits.items()):
            lt = class_labels(train, exp.bin_step)
            ls = class_labels(test, exp.bin_step)
            with open(split_dir / f"{key}-seed-{seed}.json", "w", encoding="utf-8") as fh:
                json.dump(split_summary(train, test, seed, cfg.train_fraction, lt, ls), fh,
                          indent=2, sort_keys=True)
                fh.write("\n")
    return result
