"""Monte Carlo simulation of insured-unit outcomes per climate scenario.

Each trial simulates one insured unit for one year: the neighborhood's
predicted delta distribution is perturbed by resampled model residuals, the
unit's size is drawn from an empirical table, and its realized yield delta
is the average of one normal draw per 1 km-scale sample inside the unit.
Loss formulas from the insurance module turn deltas into claims and
severities; scenario pairs are compared per neighborhood-year with a
Bonferroni-corrected rank-sum test on per-trial covered-loss severities.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ComparisonError, ConfigError, DomainError
from .geohash import code_to_int
from .insurance import CoverageMode, CoveragePolicy, LossOutcome, loss_from_delta
from .pipeline import ClimateFeatureSet, ScenarioId, ScenarioSeries
from .features import build_vector
from .regressor import ResidualSet, TrainedRegressor
from .seeding import substream
from .stats import bonferroni_threshold, mann_whitney_u, spearman_rho, SpearmanResult

ACRES_PER_KM2 = 247.105381
DEFAULT_TRIALS = 10_000

# acres -> probability; stands in for the historic unit-size record
DEFAULT_UNIT_SIZES = (
    (40.0, 0.10), (80.0, 0.22), (160.0, 0.28),
    (320.0, 0.22), (640.0, 0.13), (1280.0, 0.05),
)


class UnitSizePolicy(enum.Enum):
    HISTORIC_DRAW = "historic_draw"
    SINGLE_FIELD = "single_field"
    OPTIONAL_UNITS_REMOVED = "optional_units_removed"


@dataclass(frozen=True)
class UnitSizeTable:
    acres: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.acres) != len(self.probabilities) or not self.acres:
            raise ConfigError("size table must have matching, nonempty columns")
        if any(a <= 0 for a in self.acres) or any(p < 0 for p in self.probabilities):
            raise ConfigError("size table needs positive acres and nonnegative probabilities")
        total = sum(self.probabilities)
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-9):
            raise ConfigError(f"size table probabilities sum to {total}, expected 1")

    @classmethod
    def default(cls) -> "UnitSizeTable":
        acres, probs = zip(*DEFAULT_UNIT_SIZES)
        return cls(acres=acres, probabilities=probs)

    @classmethod
    def from_rows(cls, rows: Sequence[tuple[float, float]]) -> "UnitSizeTable":
        acres, probs = zip(*rows)
        total = sum(probs)
        if total <= 0:
            raise ConfigError("size table probabilities sum to zero")
        return cls(acres=tuple(acres), probabilities=tuple(p / total for p in probs))

    def truncate_below(self, min_acres: float) -> "UnitSizeTable":
        rows = [(a, p) for a, p in zip(self.acres, self.probabilities) if a >= min_acres]
        if not rows:
            raise ConfigError(f"no size-table rows at or above {min_acres} acres")
        return UnitSizeTable.from_rows(rows)


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: ScenarioId
    coverage: CoveragePolicy = field(default_factory=CoveragePolicy)
    trials_per_neighborhood: int = DEFAULT_TRIALS
    unit_size_policy: UnitSizePolicy = UnitSizePolicy.HISTORIC_DRAW
    size_table: UnitSizeTable = field(default_factory=UnitSizeTable.default)
    sample_granularity_km: float = 1.0
    rng_seed: int = 0
    optional_min_acres: float = 100.0
    sampler: str = "normal"   # "empirical" bootstraps from a delta pool instead

    def __post_init__(self) -> None:
        if self.trials_per_neighborhood < 1:
            raise ConfigError("trials_per_neighborhood must be >= 1")
        if self.sample_granularity_km <= 0:
            raise ConfigError("sample_granularity_km must be positive")
        if self.sampler not in ("normal", "empirical"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")


@dataclass
class NeighborhoodContext:
    """Static neighborhood attributes consumed by the engine."""

    geohash4: str
    acres: float
    z_mu: float
    z_sigma: float
    empirical_deltas: np.ndarray | None = None


@dataclass
class NeighborhoodOutcome:
    geohash4: str
    year: int
    claims_rate: float
    mean_severity_given_claim: float | None
    mean_yield_change: float
    n_trials: int
    p_value: float | None = None
    significant: bool | None = None
    samples: np.ndarray | None = field(default=None, repr=False)
    severity_samples: np.ndarray | None = field(default=None, repr=False)


@dataclass
class ScenarioRun:
    spec: ScenarioSpec
    outcomes: list[NeighborhoodOutcome]
    skipped: list[tuple[str, int, str]] = field(default_factory=list)
    acres: dict[str, float] = field(default_factory=dict)

    def outcome_map(self) -> dict[tuple[str, int], NeighborhoodOutcome]:
        return {(o.geohash4, o.year): o for o in self.outcomes}


def sample_count_for_acres(acres: float, granularity_km: float) -> int:
    """Number of independent intra-unit samples at the configured granularity."""
    cell_acres = granularity_km * granularity_km * ACRES_PER_KM2
    return max(1, int(round(acres / cell_acres)))


def draw_unit_sizes(spec: ScenarioSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """Per-trial unit acreages under the configured size policy."""
    table = spec.size_table
    if spec.unit_size_policy is UnitSizePolicy.SINGLE_FIELD:
        cell_acres = spec.sample_granularity_km**2 * ACRES_PER_KM2
        return np.full(n, cell_acres)
    if spec.unit_size_policy is UnitSizePolicy.OPTIONAL_UNITS_REMOVED:
        table = table.truncate_below(spec.optional_min_acres)
    idx = rng.choice(len(table.acres), size=n, p=table.probabilities)
    return np.asarray(table.acres)[idx]


def simulate_unit_trial(pred: tuple[float, float], residuals: ResidualSet,
                        unit_size_samples: int, coverage: CoveragePolicy,
                        rng: np.random.Generator,
                        hist_cv: float | None = None) -> tuple[float, LossOutcome]:
    """One unit trial: perturb the predicted distribution by resampled
    residuals, average ``unit_size_samples`` draws, and apply the loss rule."""
    mean_pred, std_pred = pred
    if std_pred < 0:
        raise DomainError(f"std_pred {std_pred} must be nonnegative")
    if unit_size_samples < 1:
        raise DomainError("unit_size_samples must be >= 1")
    mean_p = mean_pred + float(rng.choice(residuals.mean_residuals))
    std_p = max(std_pred + float(rng.choice(residuals.std_residuals)), 0.0)
    draws = rng.normal(mean_p, std_p, size=unit_size_samples)
    y_delta = max(float(draws.mean()), -1.0)
    return y_delta, loss_from_delta(coverage, y_delta, hist_cv=hist_cv)


def _simulate_samples(mean_pred: float, std_pred: float, residuals: ResidualSet,
                      spec: ScenarioSpec, rng: np.random.Generator,
                      empirical: np.ndarray | None) -> np.ndarray:
    """Vectorized per-trial realized deltas for one neighborhood-year.

    Draw order is fixed (residuals, sizes, then normals grouped by sample
    count) so results only depend on the substream, not on scheduling.
    """
    t = spec.trials_per_neighborhood
    mean_p = mean_pred + rng.choice(residuals.mean_residuals, size=t, replace=True)
    std_p = np.maximum(std_pred + rng.choice(residuals.std_residuals, size=t, replace=True), 0.0)
    sizes = draw_unit_sizes(spec, rng, t)
    counts = np.maximum(1, np.rint(
        sizes / (spec.sample_granularity_km**2 * ACRES_PER_KM2)).astype(int))
    deltas = np.empty(t)
    if spec.sampler == "empirical":
        if empirical is None or len(empirical) == 0:
            raise ConfigError("empirical sampler requires a neighborhood delta pool")
        pool = np.asarray(empirical, dtype=float)
        pool_mu = float(pool.mean())
        pool_sd = float(pool.std())
        if pool_sd == 0:
            pool_sd = 1.0
        unit = (pool - pool_mu) / pool_sd
    for k in np.unique(counts):
        idx = np.flatnonzero(counts == k)
        if spec.sampler == "empirical":
            picks = rng.choice(unit, size=(len(idx), int(k)), replace=True)
        else:
            picks = rng.standard_normal((len(idx), int(k)))
        deltas[idx] = mean_p[idx] + std_p[idx] * picks.mean(axis=1)
    return np.maximum(deltas, -1.0)


def _severities(spec: ScenarioSpec, deltas: np.ndarray, hist_cv: float) -> np.ndarray:
    cov = spec.coverage
    if cov.mode is CoverageMode.PERCENT_OF_HISTORY:
        return np.maximum(-deltas - (1.0 - cov.c_pct), 0.0)
    return np.maximum(-deltas - cov.c_sigma * hist_cv, 0.0)


def _run_one(spec: ScenarioSpec, context: NeighborhoodContext, year: int,
             mean_pred: float, std_pred: float, residuals: ResidualSet,
             ) -> NeighborhoodOutcome:
    rng = substream(spec.rng_seed, spec.scenario.value, code_to_int(context.geohash4), year)
    deltas = _simulate_samples(mean_pred, std_pred, residuals, spec, rng,
                               context.empirical_deltas)
    severities = _severities(spec, deltas, context.z_sigma)
    claims = severities > 0.0
    n_claims = int(claims.sum())
    return NeighborhoodOutcome(
        geohash4=context.geohash4,
        year=year,
        claims_rate=float(claims.mean()),
        mean_severity_given_claim=float(severities[claims].mean()) if n_claims else None,
        mean_yield_change=float(deltas.mean()),
        n_trials=len(deltas),
        samples=deltas,
        severity_samples=severities,
    )


def run_scenario(spec: ScenarioSpec, model: TrainedRegressor, series: ScenarioSeries,
                 contexts: Sequence[NeighborhoodContext],
                 workers: int = 1) -> ScenarioRun:
    """Simulate every (neighborhood, series year) with its own RNG substream.

    Neighborhoods missing climate features are skipped with a recorded
    reason. Reports are identical for any worker count.
    """
    if spec.scenario is not series.id:
        raise ConfigError(f"spec scenario {spec.scenario} != series {series.id}")
    if model.residuals is None:
        raise ConfigError("model has no residual pools; extract residuals before simulating")
    by_key: dict[tuple[str, int], ClimateFeatureSet] = {
        (fs.geohash4, fs.year): fs for fs in series.climate}
    ctx_map = {c.geohash4: c for c in contexts}

    tasks = []
    skipped: list[tuple[str, int, str]] = []
    for g in sorted(ctx_map):
        for year in series.years:
            fs = by_key.get((g, year))
            if fs is None:
                skipped.append((g, year, "missing climate features"))
                continue
            tasks.append((ctx_map[g], year, fs))

    def prepare(task):
        context, year, fs = task
        x = build_vector(model.schema, fs, year, context.z_mu, context.z_sigma)
        mean_pred, std_pred = model.predict(x)
        return context, year, float(mean_pred), float(std_pred)

    prepared = [prepare(t) for t in tasks]

    def simulate(item):
        context, year, mean_pred, std_pred = item
        return _run_one(spec, context, year, mean_pred, std_pred, model.residuals)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(simulate, prepared))
    else:
        outcomes = [simulate(item) for item in prepared]
    outcomes.sort(key=lambda o: (o.geohash4, o.year))
    return ScenarioRun(spec=spec, outcomes=outcomes, skipped=skipped,
                       acres={c.geohash4: c.acres for c in contexts})


@dataclass
class ScenarioAggregate:
    """Acreage-weighted aggregate row for one (scenario, series year)."""

    scenario: str
    year: int
    unit_mean_yield_change: float
    unit_loss_probability: float
    avg_covered_loss_severity: float | None


@dataclass
class SimulationReport:
    treatment: str
    counterfactual: str
    alpha: float
    n_tests: int
    p_threshold: float
    aggregates: list[ScenarioAggregate]
    treatment_outcomes: list[NeighborhoodOutcome]
    counterfactual_outcomes: list[NeighborhoodOutcome]
    acres: dict[str, float]
    pct_acreage_significant: float
    significant_neighborhoods: list[str]


def acreage_weighted(values: np.ndarray, weights: np.ndarray) -> float:
    total = float(weights.sum())
    if total <= 0:
        raise DomainError("total acreage must be positive")
    return float((values * weights).sum() / total)


def _aggregate(run: ScenarioRun, acres: dict[str, float]) -> list[ScenarioAggregate]:
    rows = []
    for year in sorted({o.year for o in run.outcomes}):
        outs = [o for o in run.outcomes if o.year == year]
        w = np.asarray([acres[o.geohash4] for o in outs])
        mean_change = acreage_weighted(np.asarray([o.mean_yield_change for o in outs]), w)
        claims = acreage_weighted(np.asarray([o.claims_rate for o in outs]), w)
        with_claims = [(o, acres[o.geohash4]) for o in outs
                       if o.mean_severity_given_claim is not None]
        severity = None
        if with_claims:
            sev = np.asarray([o.mean_severity_given_claim for o, _ in with_claims])
            ws = np.asarray([a for _, a in with_claims])
            severity = acreage_weighted(sev, ws)
        rows.append(ScenarioAggregate(
            scenario=run.spec.scenario.value, year=year,
            unit_mean_yield_change=mean_change, unit_loss_probability=claims,
            avg_covered_loss_severity=severity))
    return rows


def compare_scenarios(treatment: ScenarioRun, counterfactual: ScenarioRun,
                      alpha: float = 0.05) -> SimulationReport:
    """Rank-sum significance per neighborhood-year plus acreage-weighted
    aggregates.

    The test compares per-trial covered-loss severities (the insurer-facing
    outcome: a pure variance widening leaves the delta distribution's center
    untouched but inflates its loss tail). A neighborhood is flagged when
    any of its series years passes the Bonferroni-corrected cutoff.
    """
    t_map = treatment.outcome_map()
    c_map = counterfactual.outcome_map()
    if set(t_map) != set(c_map):
        missing = set(t_map).symmetric_difference(c_map)
        raise ComparisonError(
            f"scenario runs cover different neighborhood-years: {sorted(missing)[:5]}")
    keys = sorted(t_map)
    n_tests = len(keys)
    threshold = bonferroni_threshold(alpha, n_tests)
    flagged: set[str] = set()
    for key in keys:
        t_out, c_out = t_map[key], c_map[key]
        if t_out.severity_samples is None or c_out.severity_samples is None:
            raise ComparisonError(f"missing per-trial samples for {key}")
        result = mann_whitney_u(t_out.severity_samples, c_out.severity_samples,
                                method="asymptotic")
        significant = result.p_value < threshold
        for out in (t_out, c_out):
            out.p_value = result.p_value
            out.significant = significant
        if significant:
            flagged.add(key[0])

    acres = dict(counterfactual.acres)
    acres.update(treatment.acres)
    neighborhoods = sorted({g for g, _ in keys})
    w = np.asarray([acres[g] for g in neighborhoods])
    sig = np.asarray([1.0 if g in flagged else 0.0 for g in neighborhoods])
    pct_sig = acreage_weighted(sig, w)

    aggregates = _aggregate(counterfactual, acres) + _aggregate(treatment, acres)
    return SimulationReport(
        treatment=treatment.spec.scenario.value,
        counterfactual=counterfactual.spec.scenario.value,
        alpha=alpha, n_tests=n_tests, p_threshold=threshold,
        aggregates=aggregates,
        treatment_outcomes=treatment.outcomes,
        counterfactual_outcomes=counterfactual.outcomes,
        acres=acres,
        pct_acreage_significant=pct_sig,
        significant_neighborhoods=sorted(flagged),
    )


def climate_claims_correlation(report: SimulationReport,
                               feature_sets: Sequence[ClimateFeatureSet],
                               variable: str = "precipitation", month: int = 7,
                               stat: str = "mean") -> SpearmanResult:
    """Rank correlation between a climate delta and the change in claims rate
    across neighborhoods (e.g. drier July conditions vs rising loss
    probability)."""
    key = (variable, month, stat)
    by_g: dict[str, list[float]] = {}
    for fs in feature_sets:
        value = fs.features.get(key)
        if value is not None and not math.isnan(value):
            by_g.setdefault(fs.geohash4, []).append(value)
    t_rate: dict[str, list[float]] = {}
    c_rate: dict[str, list[float]] = {}
    for o in report.treatment_outcomes:
        t_rate.setdefault(o.geohash4, []).append(o.claims_rate)
    for o in report.counterfactual_outcomes:
        c_rate.setdefault(o.geohash4, []).append(o.claims_rate)
    xs, ys = [], []
    for g in sorted(by_g):
        if g in t_rate and g in c_rate:
            xs.append(float(np.mean(by_g[g])))
            ys.append(float(np.mean(t_rate[g])) - float(np.mean(c_rate[g])))
    if len(xs) < 3:
        raise ComparisonError("need at least 3 neighborhoods with climate and outcomes")
    return spearman_rho(xs, ys)


def with_seed(spec: ScenarioSpec, seed: int) -> ScenarioSpec:
    return replace(spec, rng_seed=seed)
