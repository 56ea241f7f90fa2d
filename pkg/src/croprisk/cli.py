"""Command line entrypoints.

Verbs: ingest, summarize, train, sweep, simulate, compare, serve. Every run
writes a manifest (config hash, seed, versions) next to its outputs. Exit
codes: 0 success, 2 usage error, 3 bad configuration or missing input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, CropRiskError
from .features import build_table
from .geohash import center
from .ingest import ingest_climate_csv, ingest_yield_csv, read_feature_sets_jsonl, \
    read_size_table_csv, read_summaries_csv, write_feature_sets_jsonl, \
    write_summaries_csv, write_yield_csv
from .insurance import CoveragePolicy, expected_yield
from .pipeline import DEFAULT_MONTHS, ScenarioId, ScenarioSeries, climate_baseline, \
    compute_yield_delta, historic_z_stats, summarize_climate, summarize_neighborhood
from .regressor import RegressorConfig, evaluate, extract_residuals, \
    load_model, save_model, train
from .reports import render_outputs, write_histograms, write_manifest, write_run_csv
from .simulation import NeighborhoodContext, ScenarioSpec, UnitSizePolicy, \
    UnitSizeTable, compare_scenarios, run_scenario
from .sweep import SplitKind, SplitSpec, load_grid_json, make_split, retrain_winner, \
    run_sweep
from .synthetic import SyntheticConfig, generate_synthetic, make_scenario_series


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}")


def _require(config: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in config]
    if missing:
        raise ConfigError(f"config is missing required keys: {', '.join(missing)}")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(args)
    if "synthetic" in config:
        synth = dict(config["synthetic"])
        if args.seed is not None:
            synth["seed"] = args.seed
        if "years" in synth:
            synth["years"] = tuple(synth["years"])
        if "variables" in synth:
            synth["variables"] = tuple(synth["variables"])
        if "months" in synth:
            synth["months"] = tuple(synth["months"])
        cfg = SyntheticConfig(**synth)
        dataset = generate_synthetic(cfg)
        write_yield_csv(dataset.yields, out / "yields.csv")
        write_feature_sets_jsonl(dataset.climate, out / "features.jsonl")
        write_summaries_csv(dataset.summaries, out / "summaries_truth.csv")
        contexts = {g: {"acres": dataset.acres[g], "z_mu": dataset.z_stats[g][0],
                        "z_sigma": dataset.z_stats[g][1],
                        "lat": center(g)[0], "lon": center(g)[1]}
                    for g in dataset.geohashes}
        with open(out / "contexts.json", "w") as fh:
            json.dump(contexts, fh, indent=2, sort_keys=True)
        scenarios_dir = out / "scenarios"
        scenarios_dir.mkdir(exist_ok=True)
        for scenario in (ScenarioId.COUNTERFACTUAL_2030, ScenarioId.SSP245_2030,
                         ScenarioId.COUNTERFACTUAL_2050, ScenarioId.SSP245_2050):
            series = make_scenario_series(dataset, scenario)
            write_feature_sets_jsonl(series.climate, scenarios_dir / f"{scenario.value}.jsonl")
        print(f"synthetic dataset: {len(dataset.yields)} unit records, "
              f"{len(dataset.summaries)} summaries -> {out}")
        write_manifest(out, "ingest", config, seed=cfg.seed)
        return 0
    _require(config, "yield_csv")
    records = ingest_yield_csv(config["yield_csv"])
    write_yield_csv(records, out / "yields.csv")
    n_climate = 0
    if "climate_csv" in config:
        series = ingest_climate_csv(config["climate_csv"])
        n_climate = sum(len(v) for v in series.values())
        # normalized copy for downstream stages
        import csv as _csv
        with open(out / "climate.csv", "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(("geohash4", "date", "variable", "value"))
            for (g, variable), rows in sorted(series.items()):
                for date, value in rows:
                    writer.writerow((g, date, variable, value))
    print(f"ingested {len(records)} yield records, {n_climate} climate rows -> {out}")
    write_manifest(out, "ingest", config, seed=args.seed)
    return 0


def cmd_summarize(args) -> int:
    config = _load_config(args.config)
    _require(config, "yields")
    out = _out_dir(args)
    window = int(config.get("window", 10))
    records = ingest_yield_csv(config["yields"])
    groups: dict[tuple[str, int], list] = {}
    for r in records:
        groups.setdefault((r.geohash4, r.year), []).append(r)
    summaries = []
    for (g, year), rows in sorted(groups.items()):
        deltas = [compute_yield_delta(r.y_actual, expected_yield(r.y_history, window))
                  for r in rows if r.y_history]
        acres = sum(r.unit_acres for r in rows)
        if deltas:
            summaries.append(summarize_neighborhood(deltas, g, year, maize_acres=acres))
    write_summaries_csv(summaries, out / "summaries.csv")
    print(f"wrote {len(summaries)} neighborhood summaries -> {out}")
    if "climate" in config:
        months = tuple(config.get("months", DEFAULT_MONTHS))
        baseline_years = config.get("baseline_years")
        series = ingest_climate_csv(config["climate"])
        by_gy: dict[tuple[str, int], dict[str, list]] = {}
        for (g, variable), rows in series.items():
            for date, value in rows:
                year = int(date[:4])
                by_gy.setdefault((g, year), {}).setdefault(variable, []).append((date, value))
        raw_sets = {key: summarize_climate(daily, key[0], key[1], months=months)
                    for key, daily in sorted(by_gy.items())}
        baselines: dict[str, dict] = {}
        for g in {g for g, _ in raw_sets}:
            ref = [fs for (gg, year), fs in raw_sets.items() if gg == g
                   and (baseline_years is None
                        or baseline_years[0] <= year <= baseline_years[1])]
            baselines[g] = climate_baseline(ref)
        feature_sets = []
        for (g, year), daily in sorted(by_gy.items()):
            feature_sets.append(summarize_climate(daily, g, year, months=months,
                                                  baseline=baselines[g]))
        write_feature_sets_jsonl(feature_sets, out / "features.jsonl")
        print(f"wrote {len(feature_sets)} climate feature sets -> {out}")
    write_manifest(out, "summarize", config, seed=args.seed)
    return 0


def _regressor_config(raw: dict, seed_override: int | None) -> RegressorConfig:
    seed = seed_override if seed_override is not None else int(raw.get("seed", 0))
    if "layer_sizes" in raw:
        layers = tuple(int(x) for x in raw["layer_sizes"])
        return RegressorConfig(layer_sizes=layers, dropout=float(raw.get("dropout", 0.0)),
                               l2=float(raw.get("l2", 0.0)),
                               dropped_attribute=raw.get("dropped_attribute"), seed=seed)
    return RegressorConfig.from_depth(int(raw.get("layers", 2)),
                                      dropout=float(raw.get("dropout", 0.0)),
                                      l2=float(raw.get("l2", 0.0)),
                                      dropped_attribute=raw.get("dropped_attribute"),
                                      seed=seed)


def _load_table(config: dict):
    _require(config, "summaries", "features")
    summaries = read_summaries_csv(config["summaries"])
    feature_sets = read_feature_sets_jsonl(config["features"])
    variables = sorted({v for fs in feature_sets for (v, _, _) in fs.features})
    months = sorted({m for fs in feature_sets for (_, m, _) in fs.features})
    from .features import FeatureSchema
    schema = FeatureSchema(variables=tuple(variables), months=tuple(months))
    z_max_year = config.get("z_max_year")
    z_stats = historic_z_stats(summaries, max_year=z_max_year)
    return build_table(summaries, feature_sets, schema, z_stats)


def _split_spec(config: dict) -> SplitSpec:
    raw = config.get("split", {})
    kind = SplitKind(raw.get("kind", "sweep_temporal"))
    kwargs = {}
    for key in ("train_years", "val_years", "test_years",
                "temporal_train_years", "temporal_test_years"):
        if key in raw:
            kwargs[key] = tuple(int(y) for y in raw[key])
    if "train_fraction" in raw:
        kwargs["train_fraction"] = float(raw["train_fraction"])
    if "seed" in raw:
        kwargs["seed"] = int(raw["seed"])
    return SplitSpec(kind=kind, **kwargs)


def cmd_train(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(args)
    table = _load_table(config)
    spec = _split_spec(config)
    split = make_split(spec, table)
    reg_config = _regressor_config(config.get("config", {}), args.seed)
    epochs = int(config.get("epochs", 200))
    model = train(reg_config, table.schema,
                  table.X[split.train_idx], table.Y[split.train_idx],
                  table.X[split.val_idx] if len(split.val_idx) else None,
                  table.Y[split.val_idx] if len(split.val_idx) else None,
                  epochs=epochs)
    if len(split.test_idx):
        model.metrics["test"] = evaluate(model, table.X[split.test_idx],
                                         table.Y[split.test_idx])
        model.residuals = extract_residuals(model, table.X[split.test_idx],
                                            table.Y[split.test_idx])
    save_model(model, out / "model.json")
    print(json.dumps(model.metrics, indent=2, sort_keys=True))
    write_manifest(out, "train", config, seed=reg_config.seed)
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(args)
    table = _load_table(config)
    spec = _split_spec(config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    grid = load_grid_json(args.grid, variables=table.schema.variables, seed=seed)
    epochs = int(config.get("epochs", 200))
    workers = int(config.get("workers", 1))
    result = run_sweep(grid, table, spec, epochs=epochs, workers=workers)
    from .fixtures import leaderboard_rows
    with open(out / "leaderboard.json", "w") as fh:
        json.dump(leaderboard_rows(result), fh, indent=2)
    model = retrain_winner(result, table)
    save_model(model, out / "model.json")
    print(f"sweep: {len(grid)} candidates; winner {result.winner.label()}")
    print(json.dumps(model.metrics, indent=2, sort_keys=True))
    write_manifest(out, "sweep", {"grid": str(args.grid), **config}, seed=seed)
    return 0


def _scenario_spec(config: dict, scenario: ScenarioId, seed_override: int | None,
                   ) -> ScenarioSpec:
    seed = seed_override if seed_override is not None else int(config.get("seed", 0))
    coverage = CoveragePolicy.percent_of_history(float(config.get("coverage_pct", 0.75)))
    size_table = UnitSizeTable.default()
    if "size_table_csv" in config:
        size_table = UnitSizeTable.from_rows(read_size_table_csv(config["size_table_csv"]))
    return ScenarioSpec(
        scenario=scenario,
        coverage=coverage,
        trials_per_neighborhood=int(config.get("trials", 10_000)),
        unit_size_policy=UnitSizePolicy(config.get("unit_size_policy", "historic_draw")),
        size_table=size_table,
        sample_granularity_km=float(config.get("sample_granularity_km", 1.0)),
        rng_seed=seed,
        optional_min_acres=float(config.get("optional_min_acres", 100.0)),
        sampler=config.get("sampler", "normal"),
    )


def _contexts_from_json(path: str) -> list[NeighborhoodContext]:
    with open(path) as fh:
        raw = json.load(fh)
    return [NeighborhoodContext(geohash4=g, acres=c["acres"], z_mu=c["z_mu"],
                                z_sigma=c["z_sigma"])
            for g, c in sorted(raw.items())]


def _series_from_config(config: dict, key: str, scenario: ScenarioId) -> ScenarioSeries:
    sets = read_feature_sets_jsonl(config[key])
    return ScenarioSeries(id=scenario, climate=tuple(sets))


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    _require(config, "model", "contexts", "scenario", "features")
    out = _out_dir(args)
    model = load_model(config["model"])
    contexts = _contexts_from_json(config["contexts"])
    scenario = ScenarioId(config["scenario"])
    spec = _scenario_spec(config, scenario, args.seed)
    series = _series_from_config(config, "features", scenario)
    run = run_scenario(spec, model, series, contexts,
                       workers=int(config.get("workers", 1)))
    write_run_csv(run, out / "outcomes.csv")
    write_histograms([run], out / "histograms.json")
    for g, year, reason in run.skipped:
        print(f"skipped {g}/{year}: {reason}", file=sys.stderr)
    print(f"simulated {len(run.outcomes)} neighborhood-years -> {out}")
    write_manifest(out, "simulate", config, seed=spec.rng_seed)
    return 0


def cmd_compare(args) -> int:
    config = _load_config(args.config)
    _require(config, "model", "contexts", "treatment", "counterfactual",
             "treatment_features", "counterfactual_features")
    out = _out_dir(args)
    model = load_model(config["model"])
    contexts = _contexts_from_json(config["contexts"])
    treatment_id = ScenarioId(config["treatment"])
    counterfactual_id = ScenarioId(config["counterfactual"])
    runs = []
    for scenario, key in ((treatment_id, "treatment_features"),
                          (counterfactual_id, "counterfactual_features")):
        spec = _scenario_spec(config, scenario, args.seed)
        series = _series_from_config(config, key, scenario)
        runs.append(run_scenario(spec, model, series, contexts,
                                 workers=int(config.get("workers", 1))))
    report = compare_scenarios(runs[0], runs[1], alpha=float(config.get("alpha", 0.05)))
    render_outputs(report, out, runs=runs)
    print(f"compared {report.treatment} vs {report.counterfactual}: "
          f"{100 * report.pct_acreage_significant:.1f}% of acreage significant "
          f"(threshold p < {report.p_threshold:.2e})")
    write_manifest(out, "compare", config, seed=args.seed)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    data_dir = Path(args.data)
    if not data_dir.is_dir():
        raise ConfigError(f"data directory not found: {data_dir}")
    app = create_app(data_dir, frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="croprisk",
        description="Crop-insurance outcome simulation under climate scenarios")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")

    p = sub.add_parser("ingest", help="validate yield/climate CSVs or generate synthetic data")
    add_common(p)
    p = sub.add_parser("summarize", help="compute neighborhood and climate summaries")
    add_common(p)
    p = sub.add_parser("train", help="train one regressor configuration")
    add_common(p)
    p = sub.add_parser("sweep", help="grid-search regressor configurations")
    add_common(p)
    p.add_argument("--grid", required=True, help="JSON grid menu path")
    p = sub.add_parser("simulate", help="Monte Carlo simulate one scenario")
    add_common(p)
    p = sub.add_parser("compare", help="simulate and compare a scenario pair")
    add_common(p)
    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--data", required=True, help="prepared data directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--frontend", default=None, help="static frontend directory to mount")
    return parser


_COMMANDS = {
    "ingest": cmd_ingest,
    "summarize": cmd_summarize,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CropRiskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
