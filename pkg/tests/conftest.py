"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

from croprisk.features import FeatureSchema
from croprisk.network import MlpParams
from croprisk.regressor import InputNormalization, RegressorConfig, ResidualSet, \
    TrainedRegressor
from croprisk.pipeline import ClimateFeatureSet, ScenarioId, ScenarioSeries
from croprisk.synthetic import SyntheticConfig, generate_synthetic

TINY_SCHEMA = FeatureSchema(variables=("precipitation",), months=(7,))


def constant_model(schema: FeatureSchema, mean_out: float, std_out: float,
                   residual_spread: float = 0.0) -> TrainedRegressor:
    """A real TrainedRegressor whose forward pass emits constant predictions.

    The std head bias is solved so softplus(bias) equals ``std_out`` exactly
    through the genuine inference path.
    """
    d = schema.n_features
    z_std = math.log(math.expm1(std_out)) if std_out > 0 else -60.0
    params = MlpParams(weights=[np.zeros((d, 8)), np.zeros((8, 2))],
                       biases=[np.zeros(8), np.array([mean_out, z_std])])
    if residual_spread > 0:
        rng = np.random.default_rng(123)
        residuals = ResidualSet(rng.normal(0, residual_spread, 50),
                                rng.normal(0, residual_spread / 2, 50))
    else:
        residuals = ResidualSet(np.zeros(1), np.zeros(1))
    return TrainedRegressor(
        config=RegressorConfig(layer_sizes=(8,), seed=0),
        schema=schema, params=params,
        normalization=InputNormalization(loc=np.zeros(d), scale=np.ones(d)),
        residuals=residuals)


def flat_series(schema: FeatureSchema, scenario: ScenarioId, geohashes,
                years=(2050,)) -> ScenarioSeries:
    """Scenario series whose climate cells are all zero."""
    sets = tuple(
        ClimateFeatureSet(geohash4=g, year=y,
                          features={k: 0.0 for k in schema.climate_keys})
        for g in geohashes for y in years)
    return ScenarioSeries(id=scenario, climate=sets)


@pytest.fixture(scope="session")
def noiseless_dataset():
    return generate_synthetic(SyntheticConfig(seed=7, noise_scale=0.0),
                              include_units=False)


@pytest.fixture(scope="session")
def small_dataset_with_units():
    cfg = SyntheticConfig(seed=11, n_neighborhoods=6, years=tuple(range(2005, 2011)),
                          units_per_neighborhood=12, noise_scale=0.01)
    return generate_synthetic(cfg, include_units=True)
