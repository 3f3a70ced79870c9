import numpy as np
import pytest

from dqbench.polluters import CompletenessSpec, TargetAccuracySpec
from dqbench.rng import derive_rng
from dqbench.scenarios import (DUPLICATION_FACTORS, FRACTION_LEVELS, build_clustering_run,
                               build_scenario, quality_grid, stratified_split)
from dqbench.tabular import DataError, class_counts

from _builders import mixed


def test_split_is_stratified_and_disjoint():
    ds = mixed(300)
    tr, te = stratified_split(ds, derive_rng(0, ["split"]))
    assert tr.n == 240 and te.n == 60
    assert class_counts(tr["y"]) == {"c0": 80, "c1": 80, "c2": 80}
    rows = {r for r in tr.rows()} | {r for r in te.rows()}
    assert len(rows) == len(set(ds.rows()))


def test_split_hits_global_target_with_uneven_classes():
    ds = mixed(301)
    tr, te = stratified_split(ds, derive_rng(1, ["split"]), 0.8)
    assert tr.n == round(0.8 * 301) and tr.n + te.n == 301


def test_split_is_seeded():
    ds = mixed(100)
    a = stratified_split(ds, derive_rng(2, ["split"]))[0]
    b = stratified_split(ds, derive_rng(2, ["split"]))[0]
    c = stratified_split(ds, derive_rng(3, ["split"]))[0]
    assert a.fingerprint() == b.fingerprint() != c.fingerprint()


def test_split_rejects_singleton_class():
    ds = mixed(7).with_column("y", ["a"] * 6 + ["b"])
    with pytest.raises(DataError, match="fewer than 2"):
        stratified_split(ds, derive_rng(0, ["s"]))


def test_grids():
    assert FRACTION_LEVELS[0] == 0.0 and FRACTION_LEVELS[-1] == 1.0 and len(FRACTION_LEVELS) == 11
    assert [float(1 / r) for r in DUPLICATION_FACTORS] == pytest.approx([1.0 - i / 10 for i in range(9)])
    assert len(quality_grid("consistency")) == 22
    with pytest.raises(DataError):
        quality_grid("timeliness")


@pytest.mark.parametrize("scenario, train_same, test_same", [(1, False, True), (2, True, False),
                                                             (3, False, False)])
def test_scenarios_pollute_the_right_side(scenario, train_same, test_same):
    tr, te = stratified_split(mixed(200), derive_rng(0, ["split"]))
    run = build_scenario(scenario, tr, te, CompletenessSpec(0.5), derive_rng(0, ["p"]))
    assert (run.train.fingerprint() == tr.fingerprint()) is train_same
    assert (run.test.fingerprint() == te.fingerprint()) is test_same


def test_scenario_three_uses_separate_streams():
    ds = mixed(200)
    half = ds.take(np.arange(100))
    run = build_scenario(3, half, half, TargetAccuracySpec(0.3), derive_rng(0, ["p"]))
    rows_tr = {r for r, *_ in run.train_pollution.log}
    rows_te = {r for r, *_ in run.test_pollution.log}
    assert rows_tr != rows_te


def test_clustering_run_pollutes_once():
    ds = mixed(90)
    run = build_clustering_run(ds, TargetAccuracySpec(0.2), derive_rng(0, ["p"]))
    assert run.train is run.test
    assert run.clean_train is ds
