"""Read-mostly HTTP/JSON service backing the interactive explorer.

Every response is derivable from the on-disk artifacts plus the request; the
only state kept between requests is a response cache keyed by the manifest
hash. On-demand simulation is bounded by a trial cap so the what-if loops
stay interactive; full-scale runs belong to the CLI.
"""

from __future__ import annotations

import json
import math
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .errors import CropRiskError
from .ingest import read_feature_sets_jsonl
from .insurance import CoveragePolicy, expected_yield, stddev_loss, yp_loss
from .pipeline import ClimateFeatureSet, ScenarioId, ScenarioSeries
from .regressor import TrainedRegressor, load_model
from .reports import aggregate_rows, histograms_for_runs, read_manifest
from .simulation import NeighborhoodContext, ScenarioSpec, compare_scenarios, run_scenario

API_SCHEMA_VERSION = "croprisk-api/1"
TRIAL_CAP = 50_000

# illustrative subsidy schedule: share of premium paid publicly per coverage level
SUBSIDY_SCHEDULE = ((0.50, 0.67), (0.55, 0.64), (0.60, 0.64), (0.65, 0.59),
                    (0.70, 0.59), (0.75, 0.55), (0.80, 0.48), (0.85, 0.38))


class SimulateRequest(BaseModel):
    scenario: str
    trials: int = Field(default=2000, ge=1)
    seed: int = 0
    coverage_pct: float = Field(default=0.75, gt=0.0, le=1.0)
    year: int | None = None
    precision: int = Field(default=4, ge=3, le=6)  # neighborhood cell size


class ClaimsRequest(BaseModel):
    history: list[float] = Field(min_length=1)
    y_actual: float = Field(ge=0.0)
    c_pct: float = Field(default=0.75, gt=0.0, le=1.0)
    c_sigma: float = Field(default=2.11, ge=0.0)
    window: int = Field(default=10, ge=1)


class SweepSurfaceRequest(BaseModel):
    layers: int | None = None
    dropout: float | None = None
    l2: float | None = None
    dropped_attribute: str | None = None
    match_dropped: bool = False
    sort_by: str = "mae_mean_val"


class RatesRequest(BaseModel):
    coverage_pct: float = Field(default=0.75, ge=0.5, le=0.85)
    acres: float = Field(default=320.0, gt=0.0)
    volatility: float = Field(default=0.12, ge=0.0, le=1.0)


class ServiceData:
    """Artifacts loaded from a prepared data directory."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.manifest = read_manifest(self.data_dir)
        self.model: TrainedRegressor = load_model(self.data_dir / "model.json")
        with open(self.data_dir / "contexts.json") as fh:
            self.contexts_raw: dict = json.load(fh)
        self.contexts = [
            NeighborhoodContext(geohash4=g, acres=c["acres"], z_mu=c["z_mu"],
                                z_sigma=c["z_sigma"])
            for g, c in sorted(self.contexts_raw.items())
        ]
        self.scenario_features: dict[str, list[ClimateFeatureSet]] = {}
        for path in sorted((self.data_dir / "scenarios").glob("*.jsonl")):
            self.scenario_features[path.stem] = read_feature_sets_jsonl(path)
        with open(self.data_dir / "runs" / "histograms.json") as fh:
            self.histograms: dict = json.load(fh)
        self.detail_rows = self._load_detail()
        leaderboard_path = self.data_dir / "leaderboard.json"
        self.leaderboard: list[dict] = []
        if leaderboard_path.exists():
            with open(leaderboard_path) as fh:
                self.leaderboard = json.load(fh)
        defaults_path = self.data_dir / "sim_defaults.json"
        self.sim_defaults: dict = {}
        if defaults_path.exists():
            with open(defaults_path) as fh:
                self.sim_defaults = json.load(fh)

    def _load_detail(self) -> list[dict]:
        import csv

        rows: list[dict] = []
        for detail in sorted((self.data_dir / "runs").glob("*/detail.csv")):
            with open(detail, newline="") as fh:
                for row in csv.DictReader(fh):
                    rows.append({
                        "scenario": row["scenario"],
                        "geohash4": row["geohash4"],
                        "year": int(row["year"]),
                        "claims_rate": float(row["claims_rate"]),
                        "mean_severity_given_claim":
                            None if row["mean_severity_given_claim"] == ""
                            else float(row["mean_severity_given_claim"]),
                        "mean_yield_change": float(row["mean_yield_change"]),
                        "n_trials": int(row["n_trials"]),
                        "p_value": None if row["p_value"] == "" else float(row["p_value"]),
                        "significant": None if row["significant"] == ""
                        else bool(int(row["significant"])),
                        "acres": float(row["acres"]),
                    })
        return rows

    @property
    def scenarios(self) -> list[str]:
        return sorted(self.scenario_features)

    @property
    def native_precision(self) -> int:
        return max((len(g) for g in self.contexts_raw), default=4)

    def series_for(self, scenario: ScenarioId, year: int | None) -> ScenarioSeries:
        sets = self.scenario_features[scenario.value]
        if year is not None:
            sets = [fs for fs in sets if fs.year == year]
            if not sets:
                raise HTTPException(404, f"year {year} not in scenario {scenario.value}")
        return ScenarioSeries(id=scenario, climate=tuple(sets))

    def inputs_at_precision(self, scenario: ScenarioId, year: int | None,
                            precision: int,
                            ) -> tuple[list[NeighborhoodContext], ScenarioSeries]:
        """Contexts and climate series, optionally coarse-grained to a shorter
        geohash prefix (acreage-weighted merge of member neighborhoods)."""
        series = self.series_for(scenario, year)
        native = self.native_precision
        if precision == native:
            return self.contexts, series
        if precision > native:
            raise HTTPException(
                422, f"precision {precision} finer than source data ({native})")
        groups: dict[str, list[NeighborhoodContext]] = {}
        for ctx in self.contexts:
            groups.setdefault(ctx.geohash4[:precision], []).append(ctx)
        merged_contexts = []
        for prefix, members in sorted(groups.items()):
            acres = sum(m.acres for m in members)
            z_mu = sum(m.z_mu * m.acres for m in members) / acres
            z_sigma = sum(m.z_sigma * m.acres for m in members) / acres
            merged_contexts.append(NeighborhoodContext(
                geohash4=prefix, acres=acres, z_mu=z_mu, z_sigma=z_sigma))
        acres_of = {c.geohash4: c.acres for c in self.contexts}
        by_cell: dict[tuple[str, int], list[ClimateFeatureSet]] = {}
        for fs in series.climate:
            by_cell.setdefault((fs.geohash4[:precision], fs.year), []).append(fs)
        merged_sets = []
        for (prefix, fs_year), members in sorted(by_cell.items()):
            weights = [acres_of.get(fs.geohash4, 1.0) for fs in members]
            total = sum(weights)
            keys = members[0].features.keys()
            features = {
                key: sum(w * fs.features[key] for w, fs in zip(weights, members)) / total
                for key in keys
            }
            merged_sets.append(ClimateFeatureSet(geohash4=prefix, year=fs_year,
                                                 features=features))
        return merged_contexts, ScenarioSeries(id=scenario, climate=tuple(merged_sets))


def _loss_pair(history: list[float], y: float, c_pct: float, c_sigma: float,
               window: int) -> dict:
    recent = history[-window:]
    mu = expected_yield(recent, window)
    out = {"y_expected": mu}
    pct = yp_loss(CoveragePolicy.percent_of_history(c_pct, window), mu, y)
    out["percent"] = {"threshold": c_pct * mu, "claim": pct.claim,
                      "loss": pct.loss, "severity": pct.severity}
    if len(recent) >= 2 and mu > 0:
        sigma = float(np.std(np.asarray(recent, dtype=float), ddof=1))
        sd = stddev_loss(CoveragePolicy.stddev_based(c_sigma, window), mu, sigma, y)
        out["stddev"] = {"threshold": mu - c_sigma * sigma, "claim": sd.claim,
                         "loss": sd.loss, "severity": sd.severity,
                         "history_std": sigma}
    else:
        out["stddev"] = None
    return out


def claims_response(req: ClaimsRequest) -> dict:
    """Final-year verdicts plus a sequential walk over the history itself."""
    per_year = []
    for t in range(1, len(req.history)):
        prior = req.history[max(0, t - req.window):t]
        entry = {"index": t, "y": req.history[t]}
        entry.update(_loss_pair(prior, req.history[t], req.c_pct, req.c_sigma, req.window))
        per_year.append(entry)
    final = _loss_pair(req.history, req.y_actual, req.c_pct, req.c_sigma, req.window)
    final["y"] = req.y_actual
    return {"final": final, "per_year": per_year,
            "c_pct": req.c_pct, "c_sigma": req.c_sigma, "window": req.window}


def rates_response(req: RatesRequest) -> dict:
    """Premium/subsidy stub: transparent, monotone, and clearly illustrative."""
    base_rate = 6.0  # currency per acre at 75% coverage, typical volatility
    premium_per_acre = base_rate * math.exp(4.0 * (req.coverage_pct - 0.75)) \
        * (0.5 + req.volatility / 0.24)
    subsidy_pct = SUBSIDY_SCHEDULE[-1][1]
    for level, share in SUBSIDY_SCHEDULE:
        if req.coverage_pct <= level + 1e-9:
            subsidy_pct = share
            break
    total = premium_per_acre * req.acres
    return {
        "model": "illustrative-stub",
        "coverage_pct": req.coverage_pct,
        "acres": req.acres,
        "volatility": req.volatility,
        "premium_per_acre": premium_per_acre,
        "total_premium": total,
        "subsidy_pct": subsidy_pct,
        "subsidy_amount": total * subsidy_pct,
        "producer_premium": total * (1.0 - subsidy_pct),
    }


def create_app(data_dir: str | Path | None = None,
               frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="croprisk service", version=__version__)
    data = ServiceData(data_dir) if data_dir is not None else None
    sim_lock = threading.Semaphore(2)
    sim_cache: dict[str, dict] = {}

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = [{"field": ".".join(str(p) for p in e["loc"]), "message": e["msg"]}
                  for e in exc.errors()]
        return JSONResponse(status_code=400, content={"errors": errors})

    @app.exception_handler(CropRiskError)
    async def croprisk_handler(request: Request, exc: CropRiskError):
        return JSONResponse(status_code=400, content={"errors": [{"message": str(exc)}]})

    def need_data() -> ServiceData:
        if data is None:
            raise HTTPException(503, "service started without a data directory")
        return data

    @app.get("/api/meta")
    def meta() -> dict:
        payload = {
            "api_schema": API_SCHEMA_VERSION,
            "version": __version__,
        }
        if data is not None:
            payload.update({
                "manifest_hash": data.manifest["config_hash"],
                "seed": data.manifest.get("seed"),
                "scenarios": data.scenarios,
                "years": sorted({r["year"] for r in data.detail_rows}),
                "sim_defaults": data.sim_defaults,
                "trial_cap": TRIAL_CAP,
            })
        return payload

    def scenario_rows(d: ServiceData, scenario: str, year: int | None) -> list[dict]:
        rows = [r for r in d.detail_rows if r["scenario"] == scenario
                and (year is None or r["year"] == year)]
        features = {(fs.geohash4, fs.year): fs
                    for fs in d.scenario_features.get(scenario, [])}
        out = []
        for r in rows:
            ctx = d.contexts_raw.get(r["geohash4"], {})
            fs = features.get((r["geohash4"], r["year"]))
            climate = {}
            if fs is not None:
                climate = {f"{v}:{m}:{s}": val for (v, m, s), val in
                           sorted(fs.features.items()) if not math.isnan(val)}
            out.append({**r, "lat": ctx.get("lat"), "lon": ctx.get("lon"),
                        "climate": climate})
        return out

    @app.get("/api/neighborhoods")
    def neighborhoods(scenario: str, year: int | None = None,
                      with_counterfactual: bool = False) -> dict:
        d = need_data()
        known = {r["scenario"] for r in d.detail_rows}
        if scenario not in known:
            raise HTTPException(404, f"unknown scenario {scenario!r}")
        rows = scenario_rows(d, scenario, year)
        if year is not None and not rows:
            raise HTTPException(404, f"no rows for scenario {scenario!r} year {year}")
        payload = {"scenario": scenario, "year": year, "rows": rows}
        if with_counterfactual:
            try:
                counterpart = ScenarioId(scenario).counterpart().value
            except (ValueError, CropRiskError):
                raise HTTPException(404, f"scenario {scenario!r} has no counterpart")
            payload["counterfactual_scenario"] = counterpart
            payload["counterfactual_rows"] = scenario_rows(d, counterpart, year)
        return payload

    @app.get("/api/histogram")
    def histogram(scenario: str, year: int) -> dict:
        d = need_data()
        if scenario not in d.histograms:
            raise HTTPException(404, f"unknown scenario {scenario!r}")
        per_year = d.histograms[scenario]
        if str(year) not in per_year:
            raise HTTPException(404, f"no histogram for {scenario!r} year {year}")
        return {"scenario": scenario, "year": year, **per_year[str(year)]}

    @app.post("/api/simulate")
    def simulate(req: SimulateRequest) -> dict:
        d = need_data()
        if req.trials > TRIAL_CAP:
            raise HTTPException(422, f"trials {req.trials} exceeds cap {TRIAL_CAP}")
        try:
            scenario = ScenarioId(req.scenario)
        except ValueError:
            raise HTTPException(404, f"unknown scenario {req.scenario!r}")
        if scenario.value not in d.scenario_features:
            raise HTTPException(404, f"scenario {req.scenario!r} not prepared")
        counterfactual = scenario.counterpart()
        if scenario.is_counterfactual:
            scenario, counterfactual = counterfactual, scenario
        cache_key = json.dumps({"m": d.manifest["config_hash"],
                                **req.model_dump()}, sort_keys=True)
        if cache_key in sim_cache:
            return sim_cache[cache_key]
        coverage = CoveragePolicy.percent_of_history(req.coverage_pct)
        with sim_lock:
            runs = []
            for scen in (counterfactual, scenario):
                spec = ScenarioSpec(scenario=scen, coverage=coverage,
                                    trials_per_neighborhood=req.trials,
                                    rng_seed=req.seed)
                contexts, series = d.inputs_at_precision(scen, req.year, req.precision)
                runs.append(run_scenario(spec, d.model, series, contexts))
            report = compare_scenarios(runs[1], runs[0])
        outcome_rows = []
        for scen_value, outcomes in ((report.counterfactual, report.counterfactual_outcomes),
                                     (report.treatment, report.treatment_outcomes)):
            for o in outcomes:
                outcome_rows.append({
                    "scenario": scen_value, "geohash4": o.geohash4, "year": o.year,
                    "claims_rate": o.claims_rate,
                    "mean_severity_given_claim": o.mean_severity_given_claim,
                    "mean_yield_change": o.mean_yield_change,
                    "n_trials": o.n_trials, "p_value": o.p_value,
                    "significant": o.significant,
                    "acres": report.acres[o.geohash4],
                })
        response = {
            "request": req.model_dump(),
            "treatment": report.treatment,
            "counterfactual": report.counterfactual,
            "aggregates": aggregate_rows(report),
            "outcomes": outcome_rows,
            "pct_acreage_significant": report.pct_acreage_significant,
            "p_threshold": report.p_threshold,
            "n_tests": report.n_tests,
            "histograms": histograms_for_runs(runs),
        }
        sim_cache[cache_key] = response
        return response

    @app.post("/api/claims")
    def claims(req: ClaimsRequest) -> dict:
        return claims_response(req)

    @app.post("/api/sweep-surface")
    def sweep_surface(req: SweepSurfaceRequest) -> dict:
        d = need_data()
        rows = d.leaderboard
        if req.layers is not None:
            rows = [r for r in rows if len(r["layers"]) == req.layers]
        if req.dropout is not None:
            rows = [r for r in rows if abs(r["dropout"] - req.dropout) < 1e-12]
        if req.l2 is not None:
            rows = [r for r in rows if abs(r["l2"] - req.l2) < 1e-12]
        if req.match_dropped:
            rows = [r for r in rows if r["dropped_attribute"] == req.dropped_attribute]
        if req.sort_by not in ("mae_mean_val", "mae_std_val", "rank", "n_parameters"):
            raise HTTPException(422, f"cannot sort by {req.sort_by!r}")
        rows = sorted(rows, key=lambda r: (r[req.sort_by], r["rank"]))
        return {"rows": rows, "total": len(rows)}

    @app.post("/api/rates")
    def rates(req: RatesRequest) -> dict:
        return rates_response(req)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="frontend")

    return app
