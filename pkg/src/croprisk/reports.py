"""File outputs for simulation reports: detail CSV, aggregate CSV/JSON,
histogram data, and run manifests.

Aggregates are re-derivable from the detail rows; histogram bins conserve
trial counts (outliers clip into the edge bins). Manifests record enough to
reproduce a run (config hash, seed, versions) without timestamps, so
identical runs write identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
from pathlib import Path

import numpy as np

from . import __version__
from .ingest import fmt6
from .simulation import ScenarioRun, SimulationReport

DETAIL_COLUMNS = ("scenario", "geohash4", "year", "claims_rate",
                  "mean_severity_given_claim", "mean_yield_change", "n_trials",
                  "p_value", "significant", "acres")
AGGREGATE_COLUMNS = ("scenario", "year", "unit_mean_yield_change",
                     "unit_loss_probability", "avg_covered_loss_severity")

DEFAULT_BIN_WIDTH = 0.05
DEFAULT_BIN_RANGE = (-1.0, 1.0)


def write_detail_csv(report: SimulationReport, path: str | Path) -> None:
    """One row per neighborhood-year-scenario."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DETAIL_COLUMNS)
        for scenario, outcomes in ((report.counterfactual, report.counterfactual_outcomes),
                                   (report.treatment, report.treatment_outcomes)):
            for o in outcomes:
                writer.writerow([
                    scenario, o.geohash4, o.year, fmt6(o.claims_rate),
                    "" if o.mean_severity_given_claim is None
                    else fmt6(o.mean_severity_given_claim),
                    fmt6(o.mean_yield_change), o.n_trials,
                    "" if o.p_value is None else fmt6(o.p_value),
                    "" if o.significant is None else int(o.significant),
                    fmt6(report.acres[o.geohash4]),
                ])


def aggregate_rows(report: SimulationReport) -> list[dict]:
    rows = []
    for agg in report.aggregates:
        rows.append({
            "scenario": agg.scenario,
            "year": agg.year,
            "unit_mean_yield_change": float(fmt6(agg.unit_mean_yield_change)),
            "unit_loss_probability": float(fmt6(agg.unit_loss_probability)),
            "avg_covered_loss_severity": None if agg.avg_covered_loss_severity is None
            else float(fmt6(agg.avg_covered_loss_severity)),
        })
    return rows


def write_aggregate_csv(report: SimulationReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_COLUMNS)
        for row in aggregate_rows(report):
            writer.writerow([
                row["scenario"], row["year"], fmt6(row["unit_mean_yield_change"]),
                fmt6(row["unit_loss_probability"]),
                "" if row["avg_covered_loss_severity"] is None
                else fmt6(row["avg_covered_loss_severity"]),
            ])


def write_aggregate_json(report: SimulationReport, path: str | Path) -> None:
    payload = {
        "treatment": report.treatment,
        "counterfactual": report.counterfactual,
        "alpha": report.alpha,
        "n_tests": report.n_tests,
        "p_threshold": report.p_threshold,
        "pct_acreage_significant": float(fmt6(report.pct_acreage_significant)),
        "significant_neighborhoods": report.significant_neighborhoods,
        "rows": aggregate_rows(report),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def histogram_data(samples: np.ndarray, bin_width: float = DEFAULT_BIN_WIDTH,
                   lo: float = DEFAULT_BIN_RANGE[0], hi: float = DEFAULT_BIN_RANGE[1],
                   ) -> tuple[list[float], list[int]]:
    """(edges, counts) with values outside [lo, hi] clipped into edge bins,
    so counts always sum to the number of samples."""
    n_bins = int(round((hi - lo) / bin_width))
    edges = np.linspace(lo, hi, n_bins + 1)
    clipped = np.clip(samples, lo, np.nextafter(hi, lo))
    counts, _ = np.histogram(clipped, bins=edges)
    return [float(e) for e in edges], [int(c) for c in counts]


def histograms_for_runs(runs: list[ScenarioRun], bin_width: float = DEFAULT_BIN_WIDTH,
                        ) -> dict:
    """Binned per-trial yield-delta distributions per (scenario, year)."""
    out: dict = {}
    for run in runs:
        scenario = run.spec.scenario.value
        years = sorted({o.year for o in run.outcomes})
        per_year = {}
        for year in years:
            samples = np.concatenate([o.samples for o in run.outcomes
                                      if o.year == year and o.samples is not None])
            edges, counts = histogram_data(samples, bin_width=bin_width)
            per_year[str(year)] = {"edges": edges, "counts": counts,
                                   "total": int(sum(counts))}
        out[scenario] = per_year
    return out


def write_histograms(runs: list[ScenarioRun], path: str | Path,
                     bin_width: float = DEFAULT_BIN_WIDTH) -> None:
    with open(path, "w") as fh:
        json.dump(histograms_for_runs(runs, bin_width=bin_width), fh, sort_keys=True)
        fh.write("\n")


def render_outputs(report: SimulationReport, out_dir: str | Path,
                   runs: list[ScenarioRun] | None = None) -> list[Path]:
    """Write the aggregate CSV/JSON, detail CSV, and histogram files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    detail = out_dir / "detail.csv"
    write_detail_csv(report, detail)
    written.append(detail)
    agg_csv = out_dir / "aggregate.csv"
    write_aggregate_csv(report, agg_csv)
    written.append(agg_csv)
    agg_json = out_dir / "aggregate.json"
    write_aggregate_json(report, agg_json)
    written.append(agg_json)
    if runs:
        hist = out_dir / "histograms.json"
        write_histograms(runs, hist)
        written.append(hist)
    return written


def write_run_csv(run: ScenarioRun, path: str | Path) -> None:
    """Per-neighborhood-year rows for a single scenario run (no comparison)."""
    scenario = run.spec.scenario.value
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DETAIL_COLUMNS)
        for o in run.outcomes:
            writer.writerow([
                scenario, o.geohash4, o.year, fmt6(o.claims_rate),
                "" if o.mean_severity_given_claim is None
                else fmt6(o.mean_severity_given_claim),
                fmt6(o.mean_yield_change), o.n_trials, "", "",
                fmt6(run.acres.get(o.geohash4, 0.0)),
            ])


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def write_manifest(out_dir: str | Path, verb: str, config: dict,
                   seed: int | None = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "verb": verb,
        "config_hash": config_hash(config),
        "config": config,
        "seed": seed,
        "versions": {
            "croprisk": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    path = out_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(out_dir: str | Path) -> dict:
    with open(Path(out_dir) / "manifest.json") as fh:
        return json.load(fh)
