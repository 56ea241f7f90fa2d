"""Yield-delta and climate summarization at the neighborhood scale.

A neighborhood is a 4-character geohash cell. Unit-level yield deltas are
summarized per (neighborhood, year) into moments plus normality/symmetry
screens; daily climate series are summarized per (variable, month) into
{min, max, mean, std} deltas against a historic baseline.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, MissingDataError

CLIMATE_VARIABLES = (
    "precipitation", "tmin", "tmax", "rh_mean", "rh_peak",
    "heat_index", "wet_bulb", "vpd", "svp",
)
CLIMATE_STATS = ("min", "max", "mean", "std")
DEFAULT_MONTHS = (4, 5, 6, 7, 8, 9)  # growing season, configurable

SKEWNESS_LIMIT = 2.0
EXCESS_KURTOSIS_LIMIT = 7.0


class ScenarioId(enum.Enum):
    HISTORIC = "historic"
    COUNTERFACTUAL_2030 = "counterfactual_2030"
    SSP245_2030 = "ssp245_2030"
    COUNTERFACTUAL_2050 = "counterfactual_2050"
    SSP245_2050 = "ssp245_2050"

    @property
    def series_year(self) -> int | None:
        if self.value.endswith("2030"):
            return 2030
        if self.value.endswith("2050"):
            return 2050
        return None

    @property
    def is_counterfactual(self) -> bool:
        return self.value.startswith("counterfactual")

    def counterpart(self) -> "ScenarioId":
        """Counterfactual paired with a projected scenario and vice versa."""
        mapping = {
            ScenarioId.SSP245_2030: ScenarioId.COUNTERFACTUAL_2030,
            ScenarioId.SSP245_2050: ScenarioId.COUNTERFACTUAL_2050,
            ScenarioId.COUNTERFACTUAL_2030: ScenarioId.SSP245_2030,
            ScenarioId.COUNTERFACTUAL_2050: ScenarioId.SSP245_2050,
        }
        if self not in mapping:
            raise DomainError(f"scenario {self.value} has no counterpart")
        return mapping[self]


@dataclass(frozen=True)
class NeighborhoodSummary:
    """Moments of one neighborhood's yield-delta distribution for one year."""

    geohash4: str
    year: int
    mean_delta: float
    std_delta: float
    count: int
    skewness: float
    excess_kurtosis: float
    approx_normal: bool
    approx_symmetric: bool
    maize_acres: float = 0.0


@dataclass(frozen=True)
class ClimateFeatureSet:
    """Per-(variable, month) climate stat deltas for one neighborhood-year.

    Keys are (variable, month, stat); missing cells are stored as NaN
    sentinels and rejected downstream unless imputation is requested.
    """

    geohash4: str
    year: int
    features: Mapping[tuple[str, int, str], float] = field(default_factory=dict)

    def get(self, variable: str, month: int, stat: str) -> float:
        return self.features.get((variable, month, stat), math.nan)


@dataclass(frozen=True)
class ScenarioSeries:
    """Climate feature sets belonging to one scenario."""

    id: ScenarioId
    climate: tuple[ClimateFeatureSet, ...]

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted({fs.year for fs in self.climate}))

    @property
    def geohashes(self) -> tuple[str, ...]:
        return tuple(sorted({fs.geohash4 for fs in self.climate}))


def compute_yield_delta(y_actual: float, y_expected: float) -> float:
    """Relative deviation ``(y_actual - y_expected) / y_expected``."""
    if y_expected <= 0:
        raise DomainError(f"y_expected {y_expected} must be > 0")
    return (y_actual - y_expected) / y_expected


def normality_screen(skewness: float, excess_kurtosis: float,
                     skew_limit: float = SKEWNESS_LIMIT,
                     kurtosis_limit: float = EXCESS_KURTOSIS_LIMIT) -> tuple[bool, bool]:
    """(approx_normal, approx_symmetric) via absolute moment cutoffs."""
    if not (math.isfinite(skewness) and math.isfinite(excess_kurtosis)):
        raise DomainError("normality screen requires finite moments")
    symmetric = abs(skewness) <= skew_limit
    normal = symmetric and abs(excess_kurtosis) <= kurtosis_limit
    return normal, symmetric


def sample_moments(values: np.ndarray) -> tuple[float, float, float, float]:
    """(mean, sample std, adjusted skewness, adjusted excess kurtosis).

    Std uses the n-1 denominator; skewness is the adjusted Fisher-Pearson
    coefficient; kurtosis is the bias-adjusted excess form. Moments that
    need more samples than provided (or a zero variance) come back as 0.
    """
    values = np.sort(np.asarray(values, dtype=float))  # exact permutation invariance
    n = len(values)
    if n == 0:
        raise DomainError("cannot summarize an empty sample")
    mean = float(values.mean())
    if n < 2:
        return mean, 0.0, 0.0, 0.0
    dev = values - mean
    m2 = float((dev**2).mean())
    std = math.sqrt(float((dev**2).sum()) / (n - 1))
    if m2 <= (1e-12 * max(1.0, abs(mean))) ** 2:  # constant up to rounding
        return mean, 0.0, 0.0, 0.0
    skew = 0.0
    if n >= 3:
        g1 = float((dev**3).mean()) / m2**1.5
        skew = g1 * math.sqrt(n * (n - 1)) / (n - 2)
    ex_kurt = 0.0
    if n >= 4:
        g2 = float((dev**4).mean()) / m2**2 - 3.0
        ex_kurt = ((n + 1) * g2 + 6.0) * (n - 1) / ((n - 2) * (n - 3))
    return mean, std, skew, ex_kurt


def summarize_neighborhood(deltas: Sequence[float] | np.ndarray, geohash4: str, year: int,
                           maize_acres: float = 0.0) -> NeighborhoodSummary:
    """Summarize one neighborhood-year's yield deltas.

    Degenerate samples (fewer than 2 values, or zero spread) record std 0 and
    fail both screening flags: there is no distribution to screen.
    """
    mean, std, skew, ex_kurt = sample_moments(np.asarray(deltas, dtype=float))
    n = len(deltas)
    if std == 0.0:
        normal, symmetric = False, False
    else:
        normal, symmetric = normality_screen(skew, ex_kurt)
    return NeighborhoodSummary(
        geohash4=geohash4, year=year, mean_delta=mean, std_delta=std, count=n,
        skewness=skew, excess_kurtosis=ex_kurt,
        approx_normal=normal, approx_symmetric=symmetric, maize_acres=maize_acres,
    )


def summarize_climate(daily: Mapping[str, Sequence[tuple[str, float]]],
                      geohash4: str, year: int,
                      months: Sequence[int] = DEFAULT_MONTHS,
                      baseline: Mapping[tuple[str, int, str], float] | None = None,
                      allow_missing: bool = False) -> ClimateFeatureSet:
    """Monthly {min, max, mean, std} of daily values, minus the baseline.

    ``daily`` maps variable name to (ISO date, value) pairs for one
    neighborhood-year. A month with no values raises MissingDataError unless
    ``allow_missing`` is set, in which case its cells become NaN sentinels.
    """
    features: dict[tuple[str, int, str], float] = {}
    problems: list[str] = []
    for variable, series in daily.items():
        by_month: dict[int, list[float]] = {m: [] for m in months}
        for date_str, value in series:
            month = int(date_str[5:7])
            if month in by_month:
                by_month[month].append(value)
        for month in months:
            values = np.asarray(by_month[month], dtype=float)
            if len(values) == 0:
                problems.append(f"{variable}: no daily values for month {month}")
                for stat in CLIMATE_STATS:
                    features[(variable, month, stat)] = math.nan
                continue
            std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
            stats = {
                "min": float(values.min()),
                "max": float(values.max()),
                "mean": float(values.mean()),
                "std": std,
            }
            for stat, raw in stats.items():
                ref = 0.0
                if baseline is not None:
                    ref = baseline.get((variable, month, stat), math.nan)
                features[(variable, month, stat)] = raw - ref
    if problems and not allow_missing:
        raise MissingDataError("; ".join(problems))
    return ClimateFeatureSet(geohash4=geohash4, year=year, features=features)


def climate_baseline(feature_sets: Iterable[ClimateFeatureSet],
                     ) -> dict[tuple[str, int, str], float]:
    """Mean raw stat per (variable, month, stat) across reference-year feature sets."""
    sums: dict[tuple[str, int, str], float] = {}
    counts: dict[tuple[str, int, str], int] = {}
    for fs in feature_sets:
        for key, value in fs.features.items():
            if math.isnan(value):
                continue
            sums[key] = sums.get(key, 0.0) + value
            counts[key] = counts.get(key, 0) + 1
    if not sums:
        raise DomainError("no feature values to build a baseline from")
    return {key: sums[key] / counts[key] for key in sums}


def historic_z_stats(summaries: Iterable[NeighborhoodSummary],
                     max_year: int | None = None) -> dict[str, tuple[float, float]]:
    """Per-neighborhood historic delta statistics (mean of means, mean of stds).

    Used as the z_mu / z_sigma model inputs; ``max_year`` restricts to the
    training period so later splits stay honest.
    """
    acc: dict[str, list[tuple[float, float]]] = {}
    for s in summaries:
        if max_year is not None and s.year > max_year:
            continue
        acc.setdefault(s.geohash4, []).append((s.mean_delta, s.std_delta))
    if not acc:
        raise DomainError("no summaries in the requested year range")
    return {
        g: (float(np.mean([m for m, _ in pairs])), float(np.mean([s for _, s in pairs])))
        for g, pairs in acc.items()
    }
