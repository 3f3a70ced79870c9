import csv
import json
from collections import Counter

import pytest

from dqbench.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from dqbench.fixtures import bundled

CSV, MANIFEST = bundled("classification")


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["shuffle"]) == EXIT_USAGE
    assert "usage error" in capsys.readouterr().err


def test_no_subcommand_is_usage_error():
    assert main([]) == EXIT_USAGE


def test_measure_needs_manifest():
    assert main(["measure", str(CSV)]) == EXIT_USAGE


def test_missing_file_is_data_error(tmp_path):
    assert main(["measure", str(tmp_path / "nope.csv"), "--manifest", str(MANIFEST)]) == EXIT_DATA


def test_measure_output_is_stable(capsys):
    assert main(["measure", str(CSV), "--manifest", str(MANIFEST)]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["--manifest", str(MANIFEST), "measure", str(CSV)]) == EXIT_OK
    assert capsys.readouterr().out == first
    rep = json.loads(first)
    assert rep["completeness"] == 1.0 and rep["balance"] == 1.0 and rep["tAccuracy"] is None


def test_pollute_then_measure(tmp_path, capsys):
    out = tmp_path / "p"
    assert main(["pollute", str(CSV), "--manifest", str(MANIFEST), "--dimension", "consistency",
                 "--level", "0.5", "--seed", "3", "--out", str(out)]) == EXIT_OK
    for name in ("polluted.csv", "pollution_log.jsonl", "representation_map.json"):
        assert (out / name).exists()
    assert main(["measure", str(out / "polluted.csv"), "--manifest", str(MANIFEST),
                 "--rep-map", str(out / "representation_map.json"),
                 "--ground-truth", str(CSV)]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    # per (column, original value): keep the larger of rewritten and untouched cells
    log = [json.loads(line) for line in (out / "pollution_log.jsonl").read_text().splitlines()]
    clean = list(csv.DictReader(open(CSV, newline="")))
    total = Counter((c, row[c]) for row in clean for c in ("shade", "city", "grade"))
    moved = Counter((e["column"], str(e["old"])) for e in log)
    fixes = sum(min(moved[k], total[k] - moved[k]) for k in total)
    assert rep["consistency"] == pytest.approx(1 - fixes / (5 * len(clean)), abs=1e-12)


def test_pollute_fractional_duplication_level(tmp_path):
    out = tmp_path / "u"
    assert main(["pollute", str(CSV), "--manifest", str(MANIFEST), "--dimension", "uniqueness",
                 "--level", "10/8", "--out", str(out)]) == EXIT_OK
    lines = (out / "polluted.csv").read_text().splitlines()
    assert len(lines) - 1 == 1875


def test_pollute_bad_level(tmp_path):
    assert main(["pollute", str(CSV), "--manifest", str(MANIFEST), "--dimension", "completeness",
                 "--level", "lots", "--out", str(tmp_path)]) == EXIT_USAGE


def test_class_balance_writes_plan(tmp_path):
    out = tmp_path / "b"
    assert main(["pollute", str(CSV), "--manifest", str(MANIFEST), "--dimension", "class_balance",
                 "--level", "0.4", "--out", str(out)]) == EXIT_OK
    plan = json.loads((out / "balance_plan.json").read_text())
    assert sum(plan["counts"].values()) == plan["n_total"]


def test_split(tmp_path):
    out = tmp_path / "s"
    assert main(["split", str(CSV), "--manifest", str(MANIFEST), "--seed", "1", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "split.json").read_text())
    assert summary["train_rows"] == 1200 and summary["test_rows"] == 300


def test_run_and_report(tmp_path):
    cfg = {"dataset": str(CSV), "manifest": str(MANIFEST), "task": "classification",
           "dimensions": ["target_accuracy"], "scenarios": [1], "algorithms": ["majority"],
           "seeds": [0], "levels": {"target_accuracy": [0.0, 0.5]}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "r"
    assert main(["run", str(path), "--out", str(out), "--threads", "2"]) == EXIT_OK
    assert (out / "results.csv").exists() and (out / "splits").is_dir()
    assert main(["report", str(out / "results.json"), "--format", "csv",
                 "--out", str(tmp_path / "again")]) == EXIT_OK
    assert (tmp_path / "again" / "results.csv").read_bytes() == (out / "results.csv").read_bytes()


def test_run_rejects_bad_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"task": "classification", "bogus": 1}))
    assert main(["run", str(path)]) == EXIT_DATA
