"""Result tables: one long table plus per-(dimension, scenario) wide tables."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

RESULT_FIELDS = ("dataset", "dimension", "scenario", "algorithm", "level", "quality",
                 "metric", "mean", "std", "n_runs")
RUN_FIELDS = ("dataset", "dimension", "scenario", "algorithm", "level", "seed", "quality",
              "metric", "value")


@dataclass(frozen=True)
class ResultRecord:
    dataset: str
    dimension: str
    scenario: int
    algorithm: str
    level: float
    quality: float
    metric: str
    mean: float
    std: float
    n_runs: int


def _cell(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def write_results_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_FIELDS)
        for r in records:
            w.writerow([_cell(getattr(r, f)) for f in RESULT_FIELDS])


def write_results_json(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([asdict(r) for r in records], fh, indent=2)
        fh.write("\n")


def read_results(path) -> list[ResultRecord]:
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            return [ResultRecord(**raw) for raw in json.load(fh)]
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(ResultRecord(row["dataset"], row["dimension"], int(row["scenario"]),
                                    row["algorithm"], float(row["level"]), float(row["quality"]),
                                    row["metric"], float(row["mean"]), float(row["std"]),
                                    int(row["n_runs"])))
    return out


def wide_tables(records) -> dict[tuple, tuple[list[str], list[list[str]]]]:
    """Rows = algorithms, columns = measured quality per level."""
    groups: dict[tuple, list[ResultRecord]] = {}
    for r in records:
        groups.setdefault((r.dataset, r.dimension, r.scenario, r.metric), []).append(r)
    tables = {}
    for key, rs in groups.items():
        levels = sorted({r.level for r in rs})
        quality = {}
        for r in rs:
            quality.setdefault(r.level, r.quality)
        header = ["algorithm"] + [f"{quality[lv]:.2f}" for lv in levels]
        algos = list(dict.fromkeys(r.algorithm for r in rs))
        lookup = {(r.algorithm, r.level): r for r in rs}
        rows = []
        for a in algos:
            rows.append([a] + [_cell(lookup[(a, lv)].mean) if (a, lv) in lookup else "" for lv in levels])
        tables[key] = (header, rows)
    return tables


def emit_report(records, out_dir, formats=("csv", "json")) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        write_results_csv(records, out_dir / "results.csv")
        written.append(out_dir / "results.csv")
    if "json" in formats:
        write_results_json(records, out_dir / "results.json")
        written.append(out_dir / "results.json")
    wide = out_dir / "wide"
    wide.mkdir(exist_ok=True)
    for (ds, dim, sc, metric), (header, rows) in wide_tables(records).items():
        safe = dim.replace("[", "_").replace("]", "").replace("=", "")
        path = wide / f"{ds}__{safe}__s{sc}__{metric}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        written.append(path)
    return written


def write_runs(runs, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_FIELDS)
        for r in runs:
            w.writerow([_cell(getattr(r, f)) for f in RUN_FIELDS])
