import hashlib
import json
import subprocess
import sys

import pytest

from croprisk.cli import main


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Run the full verb chain once: ingest -> summarize -> train/sweep."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    ingest_cfg = write_json(root / "ingest.json", {
        "synthetic": {"n_neighborhoods": 6, "seed": 5, "noise_scale": 0.02,
                      "units_per_neighborhood": 10,
                      "variables": ["precipitation", "tmax"], "months": [6, 7]},
    })
    assert main(["ingest", "--config", ingest_cfg, "--out", str(data)]) == 0
    summ_cfg = write_json(root / "summarize.json", {
        "yields": str(data / "yields.csv"),
    })
    summary_dir = root / "summaries"
    assert main(["summarize", "--config", summ_cfg, "--out", str(summary_dir)]) == 0
    return root, data, summary_dir


class TestIngest:
    def test_synthetic_outputs_exist(self, workspace):
        _, data, _ = workspace
        for name in ("yields.csv", "features.jsonl", "contexts.json",
                     "summaries_truth.csv", "manifest.json"):
            assert (data / name).exists()
        assert (data / "scenarios" / "ssp245_2050.jsonl").exists()

    def test_csv_ingest_roundtrip(self, workspace, tmp_path):
        _, data, _ = workspace
        cfg = write_json(tmp_path / "ingest2.json", {
            "yield_csv": str(data / "yields.csv")})
        out = tmp_path / "out"
        assert main(["ingest", "--config", cfg, "--out", str(out)]) == 0
        assert (out / "yields.csv").exists()

    def test_missing_config_exits_3_with_path(self, tmp_path, capsys):
        code = main(["ingest", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path)])
        assert code == 3
        assert "nope.json" in capsys.readouterr().err

    def test_invalid_json_exits_3(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["ingest", "--config", str(bad), "--out", str(tmp_path)]) == 3

    def test_unknown_flag_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["ingest", "--frobnicate"])
        assert err.value.code == 2

    def test_console_entrypoint(self):
        proc = subprocess.run([sys.executable, "-m", "croprisk.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "simulate" in proc.stdout


class TestSummarize:
    def test_summaries_written(self, workspace):
        _, _, summary_dir = workspace
        text = (summary_dir / "summaries.csv").read_text()
        assert text.startswith("geohash4,year,")
        assert len(text.strip().splitlines()) > 10


class TestTrainAndSweep:
    def test_train_writes_model(self, workspace, tmp_path):
        root, data, summary_dir = workspace
        cfg = write_json(tmp_path / "train.json", {
            "summaries": str(data / "summaries_truth.csv"),
            "features": str(data / "features.jsonl"),
            "config": {"layers": 1, "seed": 3},
            "epochs": 30,
            "z_max_year": 2012,
        })
        out = tmp_path / "model"
        assert main(["train", "--config", cfg, "--out", str(out)]) == 0
        payload = json.loads((out / "model.json").read_text())
        assert payload["schema_version"] == "croprisk-model/1"
        assert payload["residuals"] is not None

    def test_sweep_single_candidate_leaderboard(self, workspace, tmp_path):
        root, data, summary_dir = workspace
        grid = write_json(tmp_path / "grid.json", {
            "depths": [1], "dropouts": [0.0], "l2s": [0.0], "attr_drops": ["none"]})
        cfg = write_json(tmp_path / "sweep.json", {
            "summaries": str(data / "summaries_truth.csv"),
            "features": str(data / "features.jsonl"),
            "epochs": 20,
            "z_max_year": 2012,
        })
        out = tmp_path / "sweep_out"
        assert main(["sweep", "--config", cfg, "--grid", grid,
                     "--out", str(out)]) == 0
        leaderboard = json.loads((out / "leaderboard.json").read_text())
        assert len(leaderboard) == 1
        assert leaderboard[0]["rank"] == 1
        assert (out / "model.json").exists()


@pytest.fixture(scope="module")
def trained(workspace, tmp_path_factory):
    root, data, summary_dir = workspace
    tmp = tmp_path_factory.mktemp("trained")
    cfg = write_json(tmp / "train.json", {
        "summaries": str(data / "summaries_truth.csv"),
        "features": str(data / "features.jsonl"),
        "config": {"layers": 2, "seed": 3},
        "epochs": 60,
        "z_max_year": 2012,
    })
    out = tmp / "model"
    assert main(["train", "--config", cfg, "--out", str(out)]) == 0
    return out / "model.json"


class TestSimulateAndCompare:
    def test_simulate_deterministic_across_runs(self, workspace, trained, tmp_path):
        root, data, _ = workspace
        cfg = write_json(tmp_path / "sim.json", {
            "model": str(trained),
            "contexts": str(data / "contexts.json"),
            "scenario": "ssp245_2050",
            "features": str(data / "scenarios" / "ssp245_2050.jsonl"),
            "trials": 250,
        })
        hashes = []
        for run in ("a", "b"):
            out = tmp_path / run
            assert main(["simulate", "--config", cfg, "--out", str(out),
                         "--seed", "42"]) == 0
            digest = hashlib.sha256((out / "outcomes.csv").read_bytes()).hexdigest()
            hashes.append(digest)
        assert hashes[0] == hashes[1]

    def test_seed_changes_output(self, workspace, trained, tmp_path):
        root, data, _ = workspace
        cfg = write_json(tmp_path / "sim.json", {
            "model": str(trained),
            "contexts": str(data / "contexts.json"),
            "scenario": "ssp245_2050",
            "features": str(data / "scenarios" / "ssp245_2050.jsonl"),
            "trials": 250,
        })
        outs = []
        for seed in ("1", "2"):
            out = tmp_path / f"s{seed}"
            assert main(["simulate", "--config", cfg, "--out", str(out),
                         "--seed", seed]) == 0
            outs.append((out / "outcomes.csv").read_bytes())
        assert outs[0] != outs[1]

    def test_compare_writes_report(self, workspace, trained, tmp_path):
        root, data, _ = workspace
        cfg = write_json(tmp_path / "cmp.json", {
            "model": str(trained),
            "contexts": str(data / "contexts.json"),
            "treatment": "ssp245_2050",
            "counterfactual": "counterfactual_2050",
            "treatment_features": str(data / "scenarios" / "ssp245_2050.jsonl"),
            "counterfactual_features":
                str(data / "scenarios" / "counterfactual_2050.jsonl"),
            "trials": 300,
        })
        out = tmp_path / "cmp_out"
        assert main(["compare", "--config", cfg, "--out", str(out),
                     "--seed", "7"]) == 0
        agg = json.loads((out / "aggregate.json").read_text())
        assert agg["treatment"] == "ssp245_2050"
        assert len(agg["rows"]) == 2 * 3  # 2 scenarios x 3 series years
        assert (out / "detail.csv").exists()
        assert (out / "histograms.json").exists()

    def test_config_missing_keys_exit_3(self, tmp_path):
        cfg = write_json(tmp_path / "sim.json", {"model": "x.json"})
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


class TestServeValidation:
    def test_missing_data_dir_exits_3(self, tmp_path):
        assert main(["serve", "--data", str(tmp_path / "missing")]) == 3
