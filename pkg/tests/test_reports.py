import csv
import json

import numpy as np
import pytest

from croprisk.pipeline import ScenarioId
from croprisk.reports import config_hash, histogram_data, read_manifest, \
    render_outputs, write_manifest, write_run_csv
from croprisk.simulation import compare_scenarios, run_scenario

from conftest import TINY_SCHEMA, constant_model, flat_series
from test_simulation import make_contexts, single_field_spec


@pytest.fixture(scope="module")
def report_and_runs():
    contexts = make_contexts(5)
    geos = [c.geohash4 for c in contexts]
    cf_model = constant_model(TINY_SCHEMA, 0.05, 0.125)
    tr_model = constant_model(TINY_SCHEMA, 0.05, 0.25)
    years = (2050, 2051)
    run_cf = run_scenario(
        single_field_spec(ScenarioId.COUNTERFACTUAL_2050, 800, 41), cf_model,
        flat_series(TINY_SCHEMA, ScenarioId.COUNTERFACTUAL_2050, geos, years), contexts)
    run_tr = run_scenario(
        single_field_spec(ScenarioId.SSP245_2050, 800, 42), tr_model,
        flat_series(TINY_SCHEMA, ScenarioId.SSP245_2050, geos, years), contexts)
    report = compare_scenarios(run_tr, run_cf)
    return report, [run_cf, run_tr]


class TestHistograms:
    def test_default_binning_covers_unit_interval(self):
        samples = np.array([-0.501, 0.0, 0.249, 0.999])
        edges, counts = histogram_data(samples)
        assert len(edges) == 41
        assert len(counts) == 40
        assert edges[0] == -1.0 and edges[-1] == 1.0
        assert sum(counts) == len(samples)

    def test_outliers_clip_into_edge_bins(self):
        samples = np.array([-5.0, 5.0, 1.0, -1.0])
        edges, counts = histogram_data(samples)
        assert sum(counts) == 4
        assert counts[0] == 2   # -5 and -1 in the lowest bin
        assert counts[-1] == 2  # 5 and 1.0 in the highest bin

    def test_conservation_on_simulated_runs(self, report_and_runs):
        _, runs = report_and_runs
        from croprisk.reports import histograms_for_runs
        hists = histograms_for_runs(runs)
        for scenario, per_year in hists.items():
            for year, data in per_year.items():
                assert sum(data["counts"]) == data["total"]
                assert data["total"] == 5 * 800  # neighborhoods x trials


class TestRenderOutputs:
    def test_files_written_and_shaped(self, report_and_runs, tmp_path):
        report, runs = report_and_runs
        files = render_outputs(report, tmp_path, runs=runs)
        names = {f.name for f in files}
        assert names == {"detail.csv", "aggregate.csv", "aggregate.json",
                         "histograms.json"}
        with open(tmp_path / "aggregate.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4  # 2 scenarios x 2 years

    def test_detail_rows_reproduce_aggregates(self, report_and_runs, tmp_path):
        report, runs = report_and_runs
        render_outputs(report, tmp_path, runs=runs)
        with open(tmp_path / "detail.csv") as fh:
            detail = list(csv.DictReader(fh))
        with open(tmp_path / "aggregate.json") as fh:
            agg = json.load(fh)
        for row in agg["rows"]:
            relevant = [d for d in detail if d["scenario"] == row["scenario"]
                        and int(d["year"]) == row["year"]]
            w = np.array([float(d["acres"]) for d in relevant])
            claims = np.array([float(d["claims_rate"]) for d in relevant])
            recomputed = float((claims * w).sum() / w.sum())
            assert recomputed == pytest.approx(row["unit_loss_probability"], abs=1e-6)

    def test_render_is_deterministic(self, report_and_runs, tmp_path):
        report, runs = report_and_runs
        d1 = tmp_path / "a"
        d2 = tmp_path / "b"
        render_outputs(report, d1, runs=runs)
        render_outputs(report, d2, runs=runs)
        for name in ("detail.csv", "aggregate.csv", "aggregate.json",
                     "histograms.json"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_single_run_csv(self, report_and_runs, tmp_path):
        _, runs = report_and_runs
        write_run_csv(runs[0], tmp_path / "outcomes.csv")
        with open(tmp_path / "outcomes.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(runs[0].outcomes)
        assert rows[0]["scenario"] == "counterfactual_2050"


class TestManifest:
    def test_hash_is_canonical(self):
        assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_write_and_read(self, tmp_path):
        write_manifest(tmp_path, "simulate", {"trials": 100}, seed=7)
        manifest = read_manifest(tmp_path)
        assert manifest["verb"] == "simulate"
        assert manifest["seed"] == 7
        assert "croprisk" in manifest["versions"]

    def test_manifest_bytes_deterministic(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        a.mkdir()
        b.mkdir()
        write_manifest(a, "simulate", {"trials": 100}, seed=7)
        write_manifest(b, "simulate", {"trials": 100}, seed=7)
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
