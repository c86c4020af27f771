import csv
import json
from pathlib import Path

import pytest

from adaptshot.cli import main
from adaptshot.experiments import ExperimentConfig, run_experiment
from adaptshot.hamiltonian import bundled_path


def test_allocate_demo(capsys):
    assert main(["allocate-demo", "vmsa", "100", "10", "3,1"]) == 0
    out = capsys.readouterr().out
    assert "70" in out and "30" in out
    assert main(["allocate-demo", "vpsr", "100", "10", "3,1"]) == 0
    out = capsys.readouterr().out
    assert "eta=0.8" in out and "58" in out and "26" in out


def test_count_command(tmp_path, capsys):
    out = tmp_path / "counts"
    assert main(["count", "h2", "--output", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "counts.csv")))
    by_pool = {r["pool"]: r for r in rows}
    assert int(by_pool["fermionic"]["full"]) == 60
    assert int(by_pool["fermionic"]["reused"]) == 16
    assert int(by_pool["qubit"]["full"]) == 88
    assert int(by_pool["qubit"]["reused"]) == 24
    assert (out / "counts.png").exists()


def test_count_empty_pool_selection(tmp_path):
    out = tmp_path / "counts"
    assert main(["count", "h2", "--pools", "--output", str(out), "--no-plot"]) == 0
    rows = list(csv.DictReader(open(out / "counts.csv")))
    assert rows == []


def test_dump_pool(capsys):
    assert main(["dump-pool", "h2", "--pool", "qubit"]) == 0
    out = capsys.readouterr().out
    assert "12 operators" in out


def test_run_exact_mode(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["run", "h2", "--mode", "exact", "--pool", "qubit_excitation",
                 "-R", "1", "--iterations", "2", "--seed", "5",
                 "--output", str(out), "--no-plot", "--workers", "1"])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["crossing_iteration"] == 1
    agg = list(csv.DictReader(open(out / "aggregate.csv")))
    assert float(agg[0]["std_energy"]) == 0.0


def test_rerun_byte_identical(tmp_path):
    cfg = dict(hamiltonian_path=str(bundled_path("h2")), pool_kind="qubit_excitation",
               mode="shots", allocation="vpsr", shot_budget=5120, repetitions=3,
               max_iterations=2, seed_base=77, workers=1)
    a = ExperimentConfig(**cfg, output_dir=str(tmp_path / "a"))
    b = ExperimentConfig(**cfg, output_dir=str(tmp_path / "b"))
    run_experiment(a, plot=False)
    run_experiment(b, plot=False)
    for name in ("trace.csv", "aggregate.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_aggregate_recomputable(tmp_path):
    config = ExperimentConfig(
        hamiltonian_path=str(bundled_path("h2")), pool_kind="qubit_excitation",
        mode="shots", allocation="uniform", shot_budget=5120, repetitions=4,
        max_iterations=2, seed_base=31, workers=1, output_dir=str(tmp_path / "run"),
    )
    run_experiment(config, plot=False)
    trace = list(csv.DictReader(open(tmp_path / "run" / "trace.csv")))
    agg = list(csv.DictReader(open(tmp_path / "run" / "aggregate.csv")))
    by_iter = {}
    for row in trace:
        by_iter.setdefault(int(row["iteration"]), []).append(float(row["energy"]))
    for row in agg:
        n = int(row["iteration"])
        values = by_iter[n]
        if len(values) == config.repetitions:
            mean = sum(values) / len(values)
            assert abs(mean - float(row["mean_energy"])) < 1e-12


def test_config_file_with_flag_override(tmp_path, capsys):
    config_path = tmp_path / "cfg.json"
    config_path.write_text(json.dumps({
        "hamiltonian_path": str(bundled_path("h2")),
        "pool_kind": "qubit_excitation",
        "mode": "exact",
        "repetitions": 1,
        "max_iterations": 3,
        "workers": 1,
    }))
    out = tmp_path / "out"
    code = main(["run", "--config", str(config_path), "--iterations", "2",
                 "--output", str(out), "--no-plot"])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["max_iterations"] == 2  # flag overrides file


def test_unknown_config_field_rejected(tmp_path):
    config_path = tmp_path / "cfg.json"
    config_path.write_text(json.dumps({"no_such_field": 1}))
    with pytest.raises(SystemExit, match="unknown config field"):
        main(["run", "h2", "--config", str(config_path), "--no-plot"])


def test_summary_accounting_identity(tmp_path):
    config = ExperimentConfig(
        hamiltonian_path=str(bundled_path("h2")), pool_kind="qubit_excitation",
        mode="shots", allocation="uniform", shot_budget=5120, repetitions=2,
        max_iterations=2, seed_base=3, workers=1, output_dir=str(tmp_path / "r"),
    )
    run_experiment(config, plot=False)
    trace = list(csv.DictReader(open(tmp_path / "r" / "trace.csv")))
    for rep in {row["repetition"] for row in trace}:
        rows = [r for r in trace if r["repetition"] == rep]
        total = sum(int(r["vqe_shots"]) + int(r["grad_shots"]) for r in rows)
        assert int(rows[-1]["cumulative_shots"]) == total
