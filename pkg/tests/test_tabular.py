import json

import numpy as np
import pytest

from dqbench.tabular import (CATEGORICAL, NUMERICAL, ColumnMeta, DataError, Dataset,
                             DatasetManifest, class_counts, class_labels, discretize_target,
                             drop_small_classes, load_csv, one_hot_encode, round_half_up, save_csv)

from _builders import mixed, tiny


def test_csv_round_trip_is_exact(tmp_path):
    ds = mixed(50)
    man = DatasetManifest.for_dataset(ds, "m")
    save_csv(ds, tmp_path / "d.csv")
    back = load_csv(tmp_path / "d.csv", man)
    assert back.equals(ds)
    assert back.fingerprint() == ds.fingerprint()
    assert isinstance(back["level"][0], int)


def test_manifest_json_round_trip(tmp_path):
    man = DatasetManifest.for_dataset(mixed(5), "m", bin_step=2.5)
    man.save(tmp_path / "m.json")
    again = DatasetManifest.load(tmp_path / "m.json")
    assert again.to_dict() == man.to_dict()
    raw = json.loads((tmp_path / "m.json").read_text())
    assert raw["target"] == "y" and raw["dialect"]["delimiter"] == ","


def test_bad_number_reports_row_and_column(tmp_path):
    man = DatasetManifest.for_dataset(tiny(), "t")
    (tmp_path / "d.csv").write_text("x,c,y\n1.0,red,p\noops,red,q\n")
    with pytest.raises(DataError, match=r"row 3, column 'x'"):
        load_csv(tmp_path / "d.csv", man)


def test_missing_target_column(tmp_path):
    man = DatasetManifest.for_dataset(tiny(), "t")
    (tmp_path / "d.csv").write_text("x,c\n1.0,red\n")
    with pytest.raises(DataError, match="target column"):
        load_csv(tmp_path / "d.csv", man)


def test_header_only_file_is_zero_rows(tmp_path):
    man = DatasetManifest.for_dataset(tiny(), "t")
    (tmp_path / "d.csv").write_text("x,c,y\n")
    with pytest.raises(DataError, match="zero rows"):
        load_csv(tmp_path / "d.csv", man)


def test_numeric_placeholder_inside_range_is_rejected(tmp_path):
    man = DatasetManifest.for_dataset(tiny(), "t")
    (tmp_path / "d.csv").write_text("x,c,y\n-3.0,red,p\n2.0,red,q\n-1.0,blue,p\n")
    with pytest.raises(DataError, match="placeholder"):
        load_csv(tmp_path / "d.csv", man)


def test_dataset_is_immutable():
    ds = tiny()
    with pytest.raises(ValueError):
        ds["x"][0] = 9.0
    changed = ds.with_column("x", [9.0, 2.0, 2.0, 4.0])
    assert ds["x"][0] == 1.0 and changed["x"][0] == 9.0


def test_domain_excludes_placeholder():
    ds = tiny().with_column("c", ["red", "empty", "red", "blue"])
    assert ds.domain("c") == ("blue", "red")


def test_one_hot_layout_and_unseen_categories():
    train = tiny()
    X, cmap = one_hot_encode(train)
    assert cmap.entries == (("x", None), ("c", "blue"), ("c", "red"))
    assert X.tolist() == [[1, 0, 1], [2, 0, 1], [2, 0, 1], [4, 1, 0]]
    test = train.with_column("c", ["green", "red", "empty", "blue"])
    Xt, _ = one_hot_encode(test, cmap)
    assert Xt[:, 1:].tolist() == [[0, 0], [0, 1], [0, 0], [1, 0]]


def test_present_placeholder_is_its_own_category():
    ds = tiny().with_column("c", ["red", "empty", "red", "blue"])
    X, cmap = one_hot_encode(ds)
    assert ("c", "empty") in cmap.entries
    assert X[1, cmap.entries.index(("c", "empty"))] == 1.0


def test_int_and_text_categories_do_not_collide():
    cols = [ColumnMeta("k", CATEGORICAL, value_base="int"), ColumnMeta("y", CATEGORICAL, is_target=True)]
    ds = Dataset(cols, {"k": [1, 2, 1], "y": ["1", "2", "1"]})
    X, _ = one_hot_encode(ds)
    assert X.tolist() == [[1, 0], [0, 1], [1, 0]]


def test_discretize_keeps_source_values():
    cols = [ColumnMeta("x", NUMERICAL), ColumnMeta("t", NUMERICAL, is_target=True)]
    ds = Dataset(cols, {"x": [1.0, 2.0, 3.0], "t": [4.9, 5.0, 12.5]})
    out = discretize_target(ds, 5.0)
    assert out["t"].tolist() == [0, 1, 2]
    assert out.extras["source_target"].tolist() == [4.9, 5.0, 12.5]
    assert class_labels(ds, 5.0).tolist() == [0, 1, 2]


def test_drop_small_classes():
    ds = tiny()
    assert drop_small_classes(ds, 2).n == 4
    with pytest.raises(DataError, match="empty result"):
        drop_small_classes(ds, 3)


def test_class_counts_sorted_by_value():
    assert class_counts(["b", "a", "b"]) == {"a": 1, "b": 2}


@pytest.mark.parametrize("x, want", [(0.5, 1), (1.5, 2), (2.4999, 2), (0.1 * 5, 1), (7.0, 7)])
def test_round_half_up(x, want):
    assert round_half_up(x) == want


def test_take_and_rows():
    ds = tiny().take(np.array([3, 0]))
    assert list(ds.rows()) == [(4.0, "blue", "p"), (1.0, "red", "p")]
