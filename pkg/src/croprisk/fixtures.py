"""End-to-end demo bundle: synthetic data -> sweep -> simulation -> service dir.

Builds everything the HTTP service (and the explorer UI) needs from one
seed: summaries, a trained model with residuals, scenario feature sets,
precomputed scenario comparisons, histograms, and a sweep leaderboard.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

from .features import build_table
from .geohash import center
from .ingest import write_feature_sets_jsonl, write_summaries_csv
from .insurance import CoveragePolicy
from .pipeline import ScenarioId
from .regressor import TrainedRegressor, save_model
from .reports import render_outputs, write_histograms, write_manifest
from .simulation import NeighborhoodContext, ScenarioRun, ScenarioSpec, \
    SimulationReport, compare_scenarios, run_scenario
from .sweep import SplitKind, SplitSpec, SweepResult, build_grid, retrain_winner, run_sweep
from .synthetic import SyntheticConfig, SyntheticDataset, generate_synthetic, \
    make_scenario_series

DEMO_SCENARIOS = (ScenarioId.COUNTERFACTUAL_2030, ScenarioId.SSP245_2030,
                  ScenarioId.COUNTERFACTUAL_2050, ScenarioId.SSP245_2050)


def demo_contexts(dataset: SyntheticDataset) -> list[NeighborhoodContext]:
    return [NeighborhoodContext(geohash4=g, acres=dataset.acres[g],
                                z_mu=dataset.z_stats[g][0], z_sigma=dataset.z_stats[g][1])
            for g in dataset.geohashes]


def train_demo_model(dataset: SyntheticDataset, epochs: int = 400,
                     workers: int = 1) -> tuple[TrainedRegressor, SweepResult]:
    """Small sweep plus retrain; residuals come from the hidden test rows."""
    table = build_table(dataset.summaries, dataset.climate, dataset.schema,
                        dataset.z_stats)
    grid = build_grid(depths=(2, 3), dropouts=(0.0, 0.01), l2s=(0.0,),
                      attr_drops=[None], seed=dataset.config.seed)
    spec = SplitSpec(kind=SplitKind.SWEEP_TEMPORAL)
    result = run_sweep(grid, table, spec, epochs=epochs, patience=epochs,
                       batch_size=64, workers=workers)
    model = retrain_winner(result, table, batch_size=64)
    return model, result


def simulate_demo(dataset: SyntheticDataset, model: TrainedRegressor,
                  trials: int = 1500, seed: int = 0, n_series_years: int = 2,
                  ) -> tuple[dict[int, SimulationReport], list[ScenarioRun]]:
    contexts = demo_contexts(dataset)
    runs: dict[ScenarioId, ScenarioRun] = {}
    for scenario in DEMO_SCENARIOS:
        series = make_scenario_series(dataset, scenario, n_series_years=n_series_years)
        spec = ScenarioSpec(scenario=scenario, coverage=CoveragePolicy(),
                            trials_per_neighborhood=trials, rng_seed=seed)
        runs[scenario] = run_scenario(spec, model, series, contexts)
    reports = {
        2030: compare_scenarios(runs[ScenarioId.SSP245_2030],
                                runs[ScenarioId.COUNTERFACTUAL_2030]),
        2050: compare_scenarios(runs[ScenarioId.SSP245_2050],
                                runs[ScenarioId.COUNTERFACTUAL_2050]),
    }
    return reports, list(runs.values())


def leaderboard_rows(result: SweepResult) -> list[dict]:
    rows = []
    for entry in result.leaderboard:
        rows.append({
            "rank": entry.rank,
            "layers": list(entry.config.layer_sizes),
            "dropout": entry.config.dropout,
            "l2": entry.config.l2,
            "dropped_attribute": entry.config.dropped_attribute,
            "mae_mean_val": entry.mae_mean_val,
            "mae_std_val": entry.mae_std_val,
            "n_parameters": entry.n_parameters,
            "status": entry.status,
        })
    return rows


def build_demo_dir(out_dir: str | Path, seed: int = 0, trials: int = 1500,
                   n_neighborhoods: int = 15, epochs: int = 400) -> Path:
    """Write a complete service data directory; deterministic per seed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = SyntheticConfig(seed=seed, n_neighborhoods=n_neighborhoods,
                          noise_scale=0.02)
    dataset = generate_synthetic(cfg, include_units=False)
    model, sweep_result = train_demo_model(dataset, epochs=epochs)
    save_model(model, out_dir / "model.json")
    write_summaries_csv(dataset.summaries, out_dir / "summaries.csv")

    scenarios_dir = out_dir / "scenarios"
    scenarios_dir.mkdir(exist_ok=True)
    for scenario in DEMO_SCENARIOS:
        series = make_scenario_series(dataset, scenario, n_series_years=2)
        write_feature_sets_jsonl(series.climate, scenarios_dir / f"{scenario.value}.jsonl")

    contexts = {
        g: {"acres": dataset.acres[g], "z_mu": dataset.z_stats[g][0],
            "z_sigma": dataset.z_stats[g][1],
            "lat": center(g)[0], "lon": center(g)[1]}
        for g in dataset.geohashes
    }
    with open(out_dir / "contexts.json", "w") as fh:
        json.dump(contexts, fh, indent=2, sort_keys=True)

    with open(out_dir / "leaderboard.json", "w") as fh:
        json.dump(leaderboard_rows(sweep_result), fh, indent=2)

    reports, runs = simulate_demo(dataset, model, trials=trials, seed=seed)
    runs_dir = out_dir / "runs"
    runs_dir.mkdir(exist_ok=True)
    for year, report in reports.items():
        render_outputs(report, runs_dir / str(year))
    write_histograms(runs, runs_dir / "histograms.json")

    sim_defaults = {
        "trials": trials,
        "seed": seed,
        "coverage_pct": 0.75,
        "scenarios": [s.value for s in DEMO_SCENARIOS],
    }
    with open(out_dir / "sim_defaults.json", "w") as fh:
        json.dump(sim_defaults, fh, indent=2, sort_keys=True)

    write_manifest(out_dir, "fixture", {"synthetic": asdict(cfg), "trials": trials},
                   seed=seed)
    return out_dir
