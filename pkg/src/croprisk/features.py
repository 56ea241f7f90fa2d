"""Model input schema: climate stat deltas plus year and historic yield stats.

The feature vector is a fixed, dense ordering of (variable, month, stat)
climate cells followed by the year and the neighborhood's historic delta
mean/std. Attribute-drop masks zero out one named group (all stats of one
climate distribution, or the year) identically at train and inference time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MissingDataError, SchemaError
from .geohash import region_of
from .pipeline import CLIMATE_STATS, CLIMATE_VARIABLES, DEFAULT_MONTHS, \
    ClimateFeatureSet, NeighborhoodSummary

YEAR_FEATURE = "year"
Z_MU_FEATURE = "z_mu_historic"
Z_SIGMA_FEATURE = "z_sigma_historic"


def attr_drop_groups(variables: Sequence[str] = CLIMATE_VARIABLES) -> dict[str, tuple[str, ...]]:
    """Droppable input groups: each climate distribution plus the year.

    The two relative-humidity series count as a single distribution, which
    keeps the default menu at 8 climate groups + year.
    """
    groups: dict[str, tuple[str, ...]] = {}
    if "rh_mean" in variables or "rh_peak" in variables:
        rh = tuple(v for v in variables if v in ("rh_mean", "rh_peak"))
        groups["rh"] = rh
    for v in variables:
        if v in ("rh_mean", "rh_peak"):
            continue
        groups[v] = (v,)
    groups[YEAR_FEATURE] = (YEAR_FEATURE,)
    return groups


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered input layout shared by training and inference."""

    variables: tuple[str, ...] = CLIMATE_VARIABLES
    months: tuple[int, ...] = DEFAULT_MONTHS

    @property
    def climate_keys(self) -> tuple[tuple[str, int, str], ...]:
        return tuple((v, m, s) for v in self.variables for m in self.months
                     for s in CLIMATE_STATS)

    @property
    def names(self) -> tuple[str, ...]:
        climate = tuple(f"{v}:{m}:{s}" for v, m, s in self.climate_keys)
        return climate + (YEAR_FEATURE, Z_MU_FEATURE, Z_SIGMA_FEATURE)

    @property
    def n_features(self) -> int:
        return len(self.variables) * len(self.months) * len(CLIMATE_STATS) + 3

    def group_mask(self, dropped_attribute: str | None) -> np.ndarray:
        """Boolean keep-mask over features; False marks the dropped group."""
        keep = np.ones(self.n_features, dtype=bool)
        if dropped_attribute is None:
            return keep
        groups = attr_drop_groups(self.variables)
        if dropped_attribute not in groups:
            raise SchemaError(
                f"unknown attribute group {dropped_attribute!r}; "
                f"known: {sorted(groups)}")
        members = set(groups[dropped_attribute])
        for i, (v, _, _) in enumerate(self.climate_keys):
            if v in members:
                keep[i] = False
        if YEAR_FEATURE in members:
            keep[len(self.climate_keys)] = False
        return keep

    def to_dict(self) -> dict:
        return {"variables": list(self.variables), "months": list(self.months)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeatureSchema":
        return cls(variables=tuple(d["variables"]), months=tuple(int(m) for m in d["months"]))


def build_vector(schema: FeatureSchema, climate: ClimateFeatureSet, year: int,
                 z_mu: float, z_sigma: float, impute: float | None = None) -> np.ndarray:
    """Assemble one input row; NaN cells raise unless an impute value is given."""
    x = np.empty(schema.n_features, dtype=float)
    missing: list[str] = []
    for i, key in enumerate(schema.climate_keys):
        value = climate.features.get(key, math.nan)
        if math.isnan(value):
            if impute is None:
                missing.append(f"{key[0]}:{key[1]}:{key[2]}")
                value = math.nan
            else:
                value = impute
        x[i] = value
    if missing:
        raise MissingDataError(
            f"{climate.geohash4}/{climate.year}: missing climate cells: "
            + ", ".join(missing[:8]) + ("..." if len(missing) > 8 else ""))
    base = len(schema.climate_keys)
    x[base] = float(year)
    x[base + 1] = z_mu
    x[base + 2] = z_sigma
    return x


@dataclass
class RegressionTable:
    """Dense training table: one row per (neighborhood, year)."""

    schema: FeatureSchema
    X: np.ndarray            # (n, d) raw inputs
    Y: np.ndarray            # (n, 2) targets: mean_delta, std_delta
    geohashes: list[str]
    years: np.ndarray        # (n,)
    acres: np.ndarray        # (n,)
    row_keys: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.row_keys:
            self.row_keys = list(zip(self.geohashes, (int(y) for y in self.years)))
        n = len(self.X)
        if not (len(self.Y) == len(self.geohashes) == len(self.years) == len(self.acres) == n):
            raise SchemaError("regression table arrays have mismatched lengths")
        if self.X.shape[1] != self.schema.n_features:
            raise SchemaError(
                f"feature width {self.X.shape[1]} != schema width {self.schema.n_features}")

    def __len__(self) -> int:
        return len(self.X)

    @property
    def regions(self) -> list[str]:
        return [region_of(g) for g in self.geohashes]

    def subset(self, idx: np.ndarray) -> "RegressionTable":
        return RegressionTable(
            schema=self.schema,
            X=self.X[idx], Y=self.Y[idx],
            geohashes=[self.geohashes[i] for i in np.atleast_1d(idx)],
            years=self.years[idx], acres=self.acres[idx],
        )


def build_table(summaries: Iterable[NeighborhoodSummary],
                feature_sets: Iterable[ClimateFeatureSet],
                schema: FeatureSchema,
                z_stats: Mapping[str, tuple[float, float]],
                impute: float | None = None) -> RegressionTable:
    """Join summaries with climate features into a regression table.

    Rows lacking a climate feature set or z statistics are dropped; rows with
    missing climate cells follow ``build_vector``'s impute policy.
    """
    by_key = {(fs.geohash4, fs.year): fs for fs in feature_sets}
    rows, targets, geohashes, years, acres = [], [], [], [], []
    for s in sorted(summaries, key=lambda s: (s.geohash4, s.year)):
        fs = by_key.get((s.geohash4, s.year))
        if fs is None or s.geohash4 not in z_stats:
            continue
        z_mu, z_sigma = z_stats[s.geohash4]
        rows.append(build_vector(schema, fs, s.year, z_mu, z_sigma, impute=impute))
        targets.append((s.mean_delta, s.std_delta))
        geohashes.append(s.geohash4)
        years.append(s.year)
        acres.append(s.maize_acres)
    if not rows:
        raise SchemaError("no joinable (summary, climate) rows")
    return RegressionTable(
        schema=schema,
        X=np.asarray(rows, dtype=float),
        Y=np.asarray(targets, dtype=float),
        geohashes=geohashes,
        years=np.asarray(years, dtype=int),
        acres=np.asarray(acres, dtype=float),
    )
