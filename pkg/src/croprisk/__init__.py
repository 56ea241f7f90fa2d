"""Crop-insurance outcome simulation under climate scenarios.

Library surface: insurance loss formulas, geohash neighborhoods, yield/
climate summarization, a two-output feed-forward regressor with a sweep
harness, rank statistics, and a seeded Monte Carlo scenario engine, plus a
CLI (``croprisk``) and an HTTP service for the interactive explorer.
"""

__version__ = "0.1.0"

from .insurance import (  # noqa: F401
    CoverageMode,
    CoveragePolicy,
    LossOutcome,
    UnitYieldRecord,
    calibrate_c_sigma,
    claims_indicator,
    expected_yield,
    stddev_loss,
    yp_loss,
)
from .pipeline import (  # noqa: F401
    ClimateFeatureSet,
    NeighborhoodSummary,
    ScenarioId,
    ScenarioSeries,
    compute_yield_delta,
    normality_screen,
    summarize_climate,
    summarize_neighborhood,
)
from .stats import MwuResult, bonferroni_threshold, mann_whitney_u, spearman_rho  # noqa: F401
