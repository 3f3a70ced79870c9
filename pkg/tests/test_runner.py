import csv
import json

import numpy as np
import pytest

from dqbench.report import RESULT_FIELDS, emit_report, read_results
from dqbench.runner import ExperimentConfig, aggregate, run_experiment
from dqbench.tabular import DataError

from _builders import mixed


def small_cfg(tmp_path, **kw):
    base = dict(task="classification", name="mini", dimensions=["completeness", "target_accuracy"],
                scenarios=[1, 2], algorithms=["knn", "majority"], seeds=[0, 1],
                levels={"completeness": [0.0, 0.5], "target_accuracy": [0.0, 0.3]},
                out=str(tmp_path / "out"))
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_shapes_and_counts(tmp_path):
    cfg = small_cfg(tmp_path)
    res = run_experiment(cfg, mixed(150))
    assert not res.failures
    # 2 dims x 2 levels x 2 scenarios x 2 algorithms
    assert len(res.records) == 16
    assert all(r.n_runs == 2 for r in res.records)
    assert len(res.runs) == 32
    with open(tmp_path / "out" / "results.csv", newline="") as fh:
        assert tuple(next(csv.reader(fh))) == RESULT_FIELDS


def test_aggregates_recompute_from_runs(tmp_path):
    res = run_experiment(small_cfg(tmp_path), mixed(150))
    again = aggregate(res.runs, ["knn", "majority"])
    assert again == res.records
    rec = res.records[0]
    vals = [r.value for r in res.runs if (r.dimension, r.scenario, r.algorithm, r.level)
            == (rec.dimension, rec.scenario, rec.algorithm, rec.level)]
    assert rec.mean == pytest.approx(np.mean(vals)) and rec.std == pytest.approx(np.std(vals))


def test_level_zero_equals_clean_baseline(tmp_path):
    res = run_experiment(small_cfg(tmp_path), mixed(150))
    zero = {(r.dimension, r.scenario, r.algorithm): r.mean for r in res.records if r.level == 0.0}
    baseline = {k[2]: v for k, v in zero.items() if k[:2] == ("completeness", 1)}
    for (dim, sc, algo), v in zero.items():
        assert v == baseline[algo]


def test_quality_axis_is_measured(tmp_path):
    res = run_experiment(small_cfg(tmp_path), mixed(150))
    ta = [r for r in res.records if r.dimension == "target_accuracy" and r.scenario == 1]
    assert sorted({r.quality for r in ta}) == [pytest.approx(0.7), 1.0]


def test_threads_do_not_change_bytes(tmp_path):
    a = small_cfg(tmp_path / "a", threads=1)
    b = small_cfg(tmp_path / "b", threads=4)
    run_experiment(a, mixed(150))
    run_experiment(b, mixed(150))
    for name in ("results.csv", "results.json", "runs.csv"):
        assert (tmp_path / "a" / "out" / name).read_bytes() == (tmp_path / "b" / "out" / name).read_bytes()


def test_failing_cells_are_recorded_not_fatal(tmp_path):
    cfg = small_cfg(tmp_path, dimensions=["completeness", "consistency"],
                    levels={"completeness": [0.5], "consistency": [0.5]})
    ds = mixed(150)
    # an unusable placeholder turns completeness cells into failures
    ds = ds.with_column("a", ds["a"], ds.meta("a").__class__("a", "numerical", placeholder=None))
    res = run_experiment(cfg, ds)
    assert res.failures and all("completeness" in f for f in res.failures)
    assert any(r.dimension.startswith("consistency") for r in res.records)
    assert json.loads((tmp_path / "out" / "failures.json").read_text()) == res.failures


def test_consistency_skipped_without_categorical_features(tmp_path):
    from _builders import numeric_only
    cfg = small_cfg(tmp_path, dimensions=["consistency", "completeness"],
                    levels={"completeness": [0.0]})
    res = run_experiment(cfg, numeric_only(100), write=False)
    assert {r.dimension for r in res.records} == {"completeness"}


def test_config_validation():
    with pytest.raises(DataError):
        ExperimentConfig(task="ranking")
    with pytest.raises(DataError):
        ExperimentConfig(task="regression", algorithms=["knn"])
    with pytest.raises(DataError, match="unknown config keys"):
        ExperimentConfig.from_dict({"colour": 1})


def test_clustering_records(tmp_path):
    cfg = ExperimentConfig(task="clustering", name="mini", dimensions=["target_accuracy"],
                           seeds=[0], levels={"target_accuracy": [0.0, 0.5]},
                           out=str(tmp_path / "c"))
    res = run_experiment(cfg, mixed(90))
    assert [r.scenario for r in res.records] == [3, 3]
    assert {r.algorithm for r in res.records} == {"kmeans"}


def test_report_round_trip_and_empty(tmp_path):
    res = run_experiment(small_cfg(tmp_path), mixed(150))
    csv_recs = read_results(tmp_path / "out" / "results.csv")
    json_recs = read_results(tmp_path / "out" / "results.json")
    assert csv_recs == json_recs == res.records
    emit_report([], tmp_path / "empty")
    assert (tmp_path / "empty" / "results.csv").read_text() == ",".join(RESULT_FIELDS) + "\n"
    assert json.loads((tmp_path / "empty" / "results.json").read_text()) == []


def test_wide_tables_have_one_row_per_algorithm(tmp_path):
    run_experiment(small_cfg(tmp_path), mixed(150))
    wide = sorted((tmp_path / "out" / "wide").glob("*.csv"))
    assert len(wide) == 4
    with open(wide[0], newline="") as fh:
        rows = list(csv.reader(fh))
    assert [r[0] for r in rows[1:]] == ["knn", "majority"]
    assert rows[0][0] == "algorithm" and len(rows[0]) == 3
