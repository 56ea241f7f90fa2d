"""Deterministic synthetic dataset generator.

Desk-scale substitute for remote-sensing yield grids and downscaled climate
projections: yield-delta distributions respond to climate features through a
known linear (mean) and softplus-linear (std) rule, so the generator can
hand back ground-truth parameters for regressor validation. All draws come
from seeded substreams; the same config yields byte-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .features import FeatureSchema
from .geohash import encode
from .insurance import UnitYieldRecord, expected_yield
from .network import softplus
from .pipeline import ClimateFeatureSet, NeighborhoodSummary, ScenarioId, ScenarioSeries

CORN_BELT_LAT = (38.5, 44.5)
CORN_BELT_LON = (-96.5, -85.5)


@dataclass(frozen=True)
class SyntheticConfig:
    n_neighborhoods: int = 25
    years: tuple[int, ...] = tuple(range(1999, 2017))
    seed: int = 0
    units_per_neighborhood: int = 40
    variables: tuple[str, ...] = ("precipitation", "tmax", "vpd")
    months: tuple[int, ...] = (5, 6, 7)
    noise_scale: float = 0.0
    mean_coef_scale: float = 0.08
    std_coef_scale: float = 0.25
    year_trend: float = 0.0015         # mean-delta drift per year
    base_yield: float = 150.0
    base_std_level: float = 0.12       # typical target std before climate effects

    def __post_init__(self) -> None:
        if self.n_neighborhoods < 1 or not self.years:
            raise ConfigError("need at least one neighborhood and one year")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale must be nonnegative")


@dataclass(frozen=True)
class SyntheticTruth:
    """Ground-truth response mapping model inputs to targets.

    target_mean = w_mean . inputs + b_mean (+ noise)
    target_std  = softplus(w_std . inputs + b_std)
    where inputs follow the feature schema ordering (climate, year, z_mu, z_sigma).
    Monthly precipitation means carry no weight in the mean response and a
    negative weight in the std response: drier conditions raise volatility.
    """

    schema: FeatureSchema
    w_mean: np.ndarray
    b_mean: float
    w_std: np.ndarray
    b_std: float

    def target_mean(self, x: np.ndarray) -> float:
        return float(x @ self.w_mean + self.b_mean)

    def target_std(self, x: np.ndarray) -> float:
        return float(softplus(np.asarray([x @ self.w_std + self.b_std]))[0])


@dataclass
class SyntheticDataset:
    config: SyntheticConfig
    schema: FeatureSchema
    truth: SyntheticTruth
    geohashes: list[str]
    acres: dict[str, float]
    z_stats: dict[str, tuple[float, float]]
    stress: dict[str, float]                  # warming sensitivity in [0, 1]
    climate_loc: dict[str, np.ndarray]        # per-neighborhood climate centers
    summaries: list[NeighborhoodSummary]
    climate: list[ClimateFeatureSet]
    yields: list[UnitYieldRecord] = field(default_factory=list)


def _neighborhood_codes(n: int, rng: np.random.Generator) -> list[str]:
    codes: list[str] = []
    seen = set()
    while len(codes) < n:
        lat = rng.uniform(*CORN_BELT_LAT)
        lon = rng.uniform(*CORN_BELT_LON)
        code = encode(lat, lon, 4)
        if code not in seen:
            seen.add(code)
            codes.append(code)
    return codes


def _precip_mean_indices(schema: FeatureSchema) -> list[int]:
    return [i for i, (v, _, s) in enumerate(schema.climate_keys)
            if v == "precipitation" and s == "mean"]


def _truth_from(schema: FeatureSchema, cfg: SyntheticConfig,
                rng: np.random.Generator) -> SyntheticTruth:
    d = schema.n_features
    n_climate = len(schema.climate_keys)
    w_mean = np.zeros(d)
    w_std = np.zeros(d)
    w_mean[:n_climate] = rng.normal(0.0, cfg.mean_coef_scale / math.sqrt(n_climate),
                                    size=n_climate)
    w_std[:n_climate] = rng.normal(0.0, cfg.std_coef_scale / math.sqrt(n_climate),
                                   size=n_climate)
    for i in _precip_mean_indices(schema):
        w_mean[i] = 0.0
        w_std[i] = -abs(w_std[i]) - 0.05
    w_mean[n_climate] = cfg.year_trend
    w_std[n_climate] = 0.0
    w_mean[n_climate + 1] = 0.5   # optimistic neighborhoods keep doing well
    w_std[n_climate + 2] = 0.4    # historically volatile neighborhoods stay volatile
    b_mean = 0.02 - cfg.year_trend * float(np.mean(cfg.years))
    # softplus(b + 0.4 * typical z_sigma) ~ base_std_level
    b_std = math.log(math.expm1(cfg.base_std_level)) - 0.4 * 0.13
    return SyntheticTruth(schema=schema, w_mean=w_mean, b_mean=float(b_mean),
                          w_std=w_std, b_std=float(b_std))


def generate_synthetic(cfg: SyntheticConfig, include_units: bool = True) -> SyntheticDataset:
    """Build the full synthetic dataset for the configured seed."""
    schema = FeatureSchema(variables=cfg.variables, months=cfg.months)
    root = np.random.SeedSequence([cfg.seed, 77])
    ss_geo, ss_truth, ss_climate, ss_noise, ss_units, ss_attrs = root.spawn(6)

    geo_rng = np.random.default_rng(ss_geo)
    geohashes = _neighborhood_codes(cfg.n_neighborhoods, geo_rng)

    truth = _truth_from(schema, cfg, np.random.default_rng(ss_truth))

    attr_rng = np.random.default_rng(ss_attrs)
    acres = {g: float(attr_rng.uniform(2_000, 40_000)) for g in geohashes}
    z_stats = {g: (float(attr_rng.normal(0.02, 0.01)),
                   float(attr_rng.uniform(0.08, 0.18))) for g in geohashes}
    stress = {g: float(attr_rng.uniform(0.0, 1.0)) for g in geohashes}
    climate_loc = {g: attr_rng.normal(0.0, 0.5, size=len(schema.climate_keys))
                   for g in geohashes}

    climate_rng = np.random.default_rng(ss_climate)
    noise_rng = np.random.default_rng(ss_noise)
    unit_rng = np.random.default_rng(ss_units)

    summaries: list[NeighborhoodSummary] = []
    climate_sets: list[ClimateFeatureSet] = []
    yields: list[UnitYieldRecord] = []
    for g in geohashes:
        z_mu, z_sigma = z_stats[g]
        for year in cfg.years:
            cvec = climate_rng.normal(climate_loc[g], 1.0)
            features = dict(zip(schema.climate_keys, cvec.tolist()))
            climate_sets.append(ClimateFeatureSet(geohash4=g, year=year, features=features))
            x = np.concatenate([cvec, [float(year), z_mu, z_sigma]])
            mean_t = truth.target_mean(x)
            std_t = truth.target_std(x)
            if cfg.noise_scale > 0:
                mean_t += float(noise_rng.normal(0.0, cfg.noise_scale))
                std_t *= float(np.exp(noise_rng.normal(0.0, cfg.noise_scale)))
            summaries.append(NeighborhoodSummary(
                geohash4=g, year=year, mean_delta=mean_t, std_delta=std_t,
                count=cfg.units_per_neighborhood, skewness=0.0, excess_kurtosis=0.0,
                approx_normal=True, approx_symmetric=True, maize_acres=acres[g]))
            if include_units:
                unit_acres = acres[g] / cfg.units_per_neighborhood
                for u in range(cfg.units_per_neighborhood):
                    base = cfg.base_yield * float(unit_rng.uniform(0.8, 1.2))
                    history = tuple(
                        max(float(unit_rng.normal(base, z_sigma * base)), 0.0)
                        for _ in range(10))
                    delta = float(unit_rng.normal(mean_t, std_t))
                    y_actual = max(expected_yield(history) * (1.0 + delta), 0.0)
                    yields.append(UnitYieldRecord(
                        unit_id=f"{g}-{year}-{u:03d}", geohash4=g, year=year,
                        y_actual=y_actual, y_history=history, unit_acres=unit_acres))
    return SyntheticDataset(config=cfg, schema=schema, truth=truth,
                            geohashes=geohashes, acres=acres, z_stats=z_stats,
                            stress=stress, climate_loc=climate_loc,
                            summaries=summaries, climate=climate_sets, yields=yields)


def _unit_direction(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0:
        raise ConfigError("degenerate truth: zero response direction")
    return v / norm


def scenario_strength(scenario: ScenarioId, base: float = 0.35) -> float:
    """Warming shift strength: zero for counterfactuals, growing with the
    series year for the projected pathway."""
    if scenario.is_counterfactual or scenario is ScenarioId.HISTORIC:
        return 0.0
    return base * (1.0 if scenario.series_year == 2030 else 4.5)


def make_scenario_series(dataset: SyntheticDataset, scenario: ScenarioId,
                         n_series_years: int = 3, seed: int | None = None,
                         mean_drag: float = 3.0, drying: float = 5.0) -> ScenarioSeries:
    """Climate feature sets for a scenario's series years.

    A scenario pair shares base climate draws (common random numbers), so a
    counterfactual differs from its projected twin only by the warming
    shift. The shift dries out precipitation in proportion to each
    neighborhood's stress sensitivity (raising the std response through the
    truth's negative precipitation weights) and drags the mean response down
    along the mean-coefficient direction, eroding the yield gains the
    counterfactual keeps.
    """
    base_year = scenario.series_year or max(dataset.config.years)
    years = tuple(base_year + k for k in range(n_series_years))
    schema = dataset.schema
    truth = dataset.truth
    n_climate = len(schema.climate_keys)
    strength = scenario_strength(scenario)
    seed = dataset.config.seed if seed is None else seed
    rng = np.random.default_rng(np.random.SeedSequence([seed, 99, base_year]))
    precip_idx = _precip_mean_indices(schema)
    mean_dir = _unit_direction(truth.w_mean[:n_climate])
    sets = []
    for g in dataset.geohashes:
        for year in years:
            cvec = rng.normal(dataset.climate_loc[g], 1.0)
            shift = strength * dataset.stress[g]
            if shift > 0:
                cvec = cvec - mean_drag * shift * mean_dir
                if precip_idx:
                    cvec[precip_idx] -= drying * shift
            features = dict(zip(schema.climate_keys, cvec.tolist()))
            sets.append(ClimateFeatureSet(geohash4=g, year=year, features=features))
    return ScenarioSeries(id=scenario, climate=tuple(sets))
