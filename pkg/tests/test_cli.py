import csv
import json
import re
import sys
import numpy as np
import pytest
from typer.testing import CliRunner

from broadlearn.main import app, run

runner = CliRunner()

SMALL = ["--nf", "1", "--nw", "3", "--ne", "10"]
# fewer enhancement nodes keep the state matrix of the toy data well conditioned
NARROW = ["--nf", "1", "--nw", "3", "--ne", "4"]
PAIR = re.compile(r"^(\w+)=(.*)$")


@pytest.fixture(autouse=True)
def quiet_logging(restore_logging):
    yield


def invoke(*args):
    return runner.invoke(app, [str(arg) for arg in args])


def run_entry(monkeypatch, *args) -> int:
    """Exit code of the installed console entry point."""
    monkeypatch.setattr(sys, "argv", ["broadlearn", *(str(arg) for arg in args)])
    with pytest.raises(SystemExit) as exit_info:
        run()
    return exit_info.value.code


def pairs(result) -> dict:
    return dict(match.groups() for line in result.output.splitlines() if (match := PAIR.match(line)))


def written(result) -> str:
    return result.output.strip().splitlines()[-1]


def train_model(data_dir, path, *extra, shape=SMALL):
    result = invoke("train", "--train", data_dir / "toy_regression.csv", "--test", data_dir / "toy_regression_test.csv",
                    *shape, "--seed", 4, "--out", path, *extra)
    assert result.exit_code == 0, result.output
    return result


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert "1.0.0" in result.output


def test_train_bls(tmp_path, data_dir):
    result = train_model(data_dir, tmp_path / "model.json")
    values = pairs(result)
    assert values["model"] == "bls"
    assert values["n_train"] == "120" and values["L"] == "13"
    assert float(values["test_rmse"]) >= 0.0
    assert written(result) == str(tmp_path / "model.json")
    assert (tmp_path / "model.json").exists()


def test_train_cbls(tmp_path, data_dir):
    result = train_model(data_dir, tmp_path / "model.json", "--model", "cbls", "--gamma", "0.001", "--sigma", "1")
    values = pairs(result)
    assert values["model"] == "cbls"
    assert values["converged"] in ("true", "false")
    assert int(values["n_iter"]) >= 1


def test_training_is_deterministic(tmp_path, data_dir):
    train_model(data_dir, tmp_path / "a.json", "--model", "cbls", "--gamma", "0.001")
    train_model(data_dir, tmp_path / "b.json", "--model", "cbls", "--gamma", "0.001")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_predict(tmp_path, data_dir):
    train_model(data_dir, tmp_path / "model.json")
    result = invoke("predict", tmp_path / "model.json", "--test", data_dir / "toy_regression_test.csv",
                    "--out", tmp_path / "pred.csv")
    assert result.exit_code == 0, result.output
    assert pairs(result)["n"] == "40"
    lines = (tmp_path / "pred.csv").read_text().splitlines()
    assert lines[0] == "y0" and len(lines) == 41


def test_classification_round(tmp_path, data_dir):
    result = invoke("train", "--train", data_dir / "toy_classification.csv", "--task", "classification",
                    "--nf", "1", "--nw", "2", "--ne", "20", "--out", tmp_path / "model.json")
    assert result.exit_code == 0, result.output
    assert 0.0 <= float(pairs(result)["train_accuracy"]) <= 100.0

    result = invoke("predict", tmp_path / "model.json", "--test", data_dir / "toy_classification_test.csv",
                    "--out", tmp_path / "pred.csv")
    assert result.exit_code == 0, result.output
    with open(tmp_path / "pred.csv", newline="") as csv_file:
        predictions = [row["prediction"] for row in csv.DictReader(csv_file)]
    assert len(predictions) == 40
    assert set(predictions) <= {"inner", "outer"}


@pytest.mark.parametrize("model", ["bls", "cbls"])
def test_increment_enhancement(tmp_path, data_dir, model):
    train_model(data_dir, tmp_path / "model.json", "--model", model, "--gamma", "1e-9" if model == "bls" else "0.01",
                shape=NARROW)
    result = invoke("increment", tmp_path / "model.json", "--mode", "enhancement", "--ne", 5, "--seed", 9,
                    "--out", tmp_path / "grown.json")
    assert result.exit_code == 0, result.output
    values = pairs(result)
    assert values["L"] == "12"
    assert float(values["oracle_gap"]) < 1e-8
    assert written(result) == str(tmp_path / "grown.json")


def test_increment_samples_in_place(tmp_path, data_dir):
    train_model(data_dir, tmp_path / "model.json", "--model", "cbls", "--gamma", "0.01", shape=NARROW)
    result = invoke("increment", tmp_path / "model.json", "--mode", "samples",
                    "--train", data_dir / "toy_regression_test.csv", "--test", data_dir / "toy_regression_test.csv")
    assert result.exit_code == 0, result.output
    values = pairs(result)
    assert values["n_train"] == "160"
    assert float(values["oracle_gap"]) < 1e-8
    assert "test_rmse" in values
    assert written(result) == str(tmp_path / "model.json")


def test_refresh_needs_correntropy_model(tmp_path, data_dir):
    train_model(data_dir, tmp_path / "model.json")
    result = invoke("increment", tmp_path / "model.json", "--mode", "features", "--refresh")
    assert result.exit_code == 1


def test_gen_mackey_glass(tmp_path):
    result = invoke("gen", "mackey-glass", "--out", tmp_path / "mg.txt")
    assert result.exit_code == 0, result.output
    assert pairs(result)["n"] == "1200"
    assert len((tmp_path / "mg.txt").read_text().splitlines()) == 1200


def test_gen_sinc(tmp_path):
    result = invoke("gen", "sinc", "--n", 50, "--out", tmp_path / "sinc.csv")
    assert result.exit_code == 0, result.output
    assert len((tmp_path / "sinc.csv").read_text().splitlines()) == 50


def test_bench_writes_curve(tmp_path, data_dir):
    result = invoke("bench", "--train", data_dir / "toy_regression.csv", "--test", data_dir / "toy_regression_test.csv",
                    "--p-list", "0,0.1,0.2,0.3,0.4", "--runs", 2, "--sigma", 1, *SMALL, "--out", tmp_path / "bench.json")
    assert result.exit_code == 0, result.output
    assert pairs(result)["levels"] == "5"
    with open(tmp_path / "bench.csv", newline="") as csv_file:
        rows = list(csv.DictReader(csv_file))
    assert [float(row["p"]) for row in rows] == [0.0, 0.1, 0.2, 0.3, 0.4]
    assert {"bls_median", "cbls_median"} <= set(rows[0])
    assert written(result) == str(tmp_path / "bench.json")


def test_bench_series_file(tmp_path):
    t = np.arange(150)
    (tmp_path / "spots.txt").write_text("\n".join(f"{80 + 60 * np.sin(0.3 * i) * np.cos(0.05 * i):.1f}" for i in t))
    result = invoke("bench", "--series", tmp_path / "spots.txt", "--dim", 4, "--delay", 1, "--noise", "gaussian",
                    "--runs", 2, "--sigma", 1, "--gamma", "0.001", *NARROW, "--out", tmp_path / "series.json")
    assert result.exit_code == 0, result.output
    values = pairs(result)
    assert values["models"] == "2"
    assert float(values["cbls_median"]) >= 0.0
    document = json.loads((tmp_path / "series.json").read_text())
    assert document["kind"] == "time_series"
    assert document["config"]["series"] == {"source": "recorded", "length": 150}
    assert document["config"]["dim"] == 4 and document["config"]["n_train"] == 120


def test_bench_series_too_short(tmp_path):
    (tmp_path / "short.txt").write_text("1\n2\n3\n")
    result = invoke("bench", "--series", tmp_path / "short.txt", "--dim", 4, "--out", tmp_path / "series.json")
    assert result.exit_code == 1
    assert not (tmp_path / "series.json").exists()


def test_bench_rejects_bad_levels(tmp_path, monkeypatch):
    assert run_entry(monkeypatch, "bench", "--p-list", "0,abc", "--out", tmp_path / "bench.json") == 1
    assert not (tmp_path / "bench.json").exists()


def test_grid_singleton(tmp_path, data_dir):
    result = invoke("grid", "--train", data_dir / "toy_regression.csv", "--test", data_dir / "toy_regression_test.csv",
                    *SMALL, "--sigma", 1, "--gamma", "0.001", "--runs", 2, "--select", "test",
                    "--out", tmp_path / "grid.json")
    assert result.exit_code == 0, result.output
    values = pairs(result)
    assert values["cells"] == "1"
    assert values["best_L"] == "13"
    assert float(values["mean_test_rmse"]) >= 0.0
    assert (tmp_path / "grid.json").exists() and (tmp_path / "grid.csv").exists()


def test_missing_file(tmp_path):
    result = invoke("train", "--train", tmp_path / "nothing.csv", "--out", tmp_path / "model.json")
    assert result.exit_code == 1
    assert not (tmp_path / "model.json").exists()


def test_malformed_file(tmp_path):
    (tmp_path / "bad.csv").write_text("1,2\n3,x\n")
    result = invoke("train", "--train", tmp_path / "bad.csv", "--out", tmp_path / "model.json")
    assert result.exit_code == 1


def test_unknown_option(monkeypatch, capsys):
    assert run_entry(monkeypatch, "train", "--frobnicate") == 1
    assert "frobnicate" in capsys.readouterr().err


def test_entry_point_exit_codes(tmp_path, data_dir, monkeypatch):
    assert run_entry(monkeypatch, "--version") == 0
    assert run_entry(monkeypatch, "train", "--train", tmp_path / "nothing.csv", "--out", tmp_path / "model.json") == 1
    assert run_entry(monkeypatch, "train", "--train", data_dir / "toy_regression.csv", *SMALL, "--model", "cbls",
                     "--gamma", "0.001", "--max-iter", 1, "--eps", "1e-300", "--strict",
                     "--out", tmp_path / "model.json") == 2
    assert run_entry(monkeypatch, "train", "--train", data_dir / "toy_regression.csv", *SMALL,
                     "--out", tmp_path / "model.json") == 0


def test_strict_non_convergence(tmp_path, data_dir):
    result = invoke("train", "--train", data_dir / "toy_regression.csv", *SMALL, "--model", "cbls", "--gamma", "0.001",
                    "--max-iter", 1, "--eps", "1e-300", "--strict", "--out", tmp_path / "model.json")
    assert result.exit_code == 2
    assert not (tmp_path / "model.json").exists()
