"""Synthetic datasets bundled with the package.

``classification`` is a separable three-class problem with mixed feature
types; ``regression`` has a positive numeric target and a bin step for
discretization. Both are generated from fixed seeds, so the CSV files under
``dqbench/data`` can be regenerated byte for byte.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .tabular import CATEGORICAL, NUMERICAL, ColumnMeta, Dataset, DatasetManifest, load_csv, save_csv

CITIES = ("berlin", "hamburg", "munich", "potsdam")
SHADES = ("blue", "green", "red")


def make_classification(n_per_class: int = 500, seed: int = 7) -> Dataset:
    """Three well separated classes; numeric blobs plus class-correlated categories."""
    gen = np.random.default_rng(seed)
    m = 3
    y = np.repeat(np.arange(m), n_per_class)
    n = len(y)
    centers = np.array([[20.0, 30.0], [35.0, 45.0], [50.0, 30.0]])
    xy = centers[y] + gen.normal(0.0, 2.5, size=(n, 2))
    shade = np.array(SHADES, dtype=object)[np.where(gen.random(n) < 0.85, y, gen.integers(0, m, n))]
    city = np.array(CITIES, dtype=object)[gen.integers(0, len(CITIES), n)]
    grade = np.where(gen.random(n) < 0.7, y + 1, gen.integers(1, 4, n)).astype(int)
    perm = gen.permutation(n)
    cols = [
        ColumnMeta("x1", NUMERICAL, placeholder=-1.0),
        ColumnMeta("x2", NUMERICAL, placeholder=-1.0),
        ColumnMeta("shade", CATEGORICAL, placeholder="empty"),
        ColumnMeta("city", CATEGORICAL, placeholder="empty"),
        ColumnMeta("grade", CATEGORICAL, placeholder=0, value_base="int"),
        ColumnMeta("label", CATEGORICAL, is_target=True),
    ]
    labels = np.array(["alpha", "beta", "gamma"], dtype=object)[y]
    data = {
        "x1": np.round(xy[perm, 0], 3), "x2": np.round(xy[perm, 1], 3),
        "shade": shade[perm], "city": city[perm], "grade": grade[perm].tolist(),
        "label": labels[perm],
    }
    return Dataset(cols, data)


def make_regression(n: int = 1500, seed: int = 11) -> Dataset:
    gen = np.random.default_rng(seed)
    size = gen.uniform(40.0, 160.0, n)
    age = gen.uniform(1.0, 60.0, n)
    district = np.array(CITIES, dtype=object)[gen.integers(0, len(CITIES), n)]
    rooms = gen.integers(1, 6, n)
    bonus = np.array([30.0, 10.0, 60.0, 0.0])[[CITIES.index(d) for d in district]]
    price = 50.0 + 2.0 * size - 0.8 * age + 8.0 * rooms + bonus + gen.normal(0.0, 12.0, n)
    cols = [
        ColumnMeta("size", NUMERICAL, placeholder=-1.0),
        ColumnMeta("age", NUMERICAL, placeholder=-1.0),
        ColumnMeta("district", CATEGORICAL, placeholder="empty"),
        ColumnMeta("rooms", CATEGORICAL, placeholder=0, value_base="int"),
        ColumnMeta("price", NUMERICAL, is_target=True),
    ]
    data = {"size": np.round(size, 2), "age": np.round(age, 1), "district": district,
            "rooms": rooms.tolist(), "price": np.round(price, 2)}
    return Dataset(cols, data)


REGRESSION_BIN_STEP = 50.0


def data_dir() -> Path:
    return Path(str(resources.files("dqbench") / "data"))


def bundled(name: str) -> tuple[Path, Path]:
    """(csv path, manifest path) of a bundled fixture."""
    d = data_dir()
    return d / f"{name}.csv", d / f"{name}.manifest.json"


def load_bundled(name: str) -> tuple[Dataset, DatasetManifest]:
    csv_path, manifest_path = bundled(name)
    manifest = DatasetManifest.load(manifest_path)
    return load_csv(csv_path, manifest), manifest


def write_bundled(target: Path | None = None) -> None:
    target = Path(target) if target else data_dir()
    target.mkdir(parents=True, exist_ok=True)
    for name, ds, step in (("classification", make_classification(), None),
                           ("regression", make_regression(), REGRESSION_BIN_STEP)):
        save_csv(ds, target / f"{name}.csv")
        DatasetManifest.for_dataset(ds, name, step).save(target / f"{name}.manifest.json")
