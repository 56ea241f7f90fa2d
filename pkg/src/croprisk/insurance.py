"""Yield-based insurance loss formulas.

Implements the percent-of-history guarantee (the Yield Protection style
``max(c * y_expected - y_actual, 0)``) and the variance-aware alternative
that guarantees the historic mean minus a multiple of the historic standard
deviation. All functions are pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DomainError

DEFAULT_COVERAGE_PCT = 0.75
DEFAULT_COVERAGE_SIGMA = 2.11
DEFAULT_HISTORY_WINDOW = 10


class CoverageMode(enum.Enum):
    PERCENT_OF_HISTORY = "percent_of_history"
    STDDEV_BASED = "stddev_based"


@dataclass(frozen=True)
class CoveragePolicy:
    """Coverage rule for an insured unit.

    ``c_pct`` is the guaranteed fraction of expected yield in
    PERCENT_OF_HISTORY mode; ``c_sigma`` the number of standard deviations
    below the historic mean guaranteed in STDDEV_BASED mode.
    """

    mode: CoverageMode = CoverageMode.PERCENT_OF_HISTORY
    c_pct: float = DEFAULT_COVERAGE_PCT
    c_sigma: float = DEFAULT_COVERAGE_SIGMA
    history_window: int = DEFAULT_HISTORY_WINDOW

    def __post_init__(self) -> None:
        if not 0.0 < self.c_pct <= 1.0:
            raise DomainError(f"c_pct {self.c_pct} outside (0, 1]")
        if self.c_sigma < 0.0:
            raise DomainError(f"c_sigma {self.c_sigma} must be nonnegative")
        if self.history_window < 1:
            raise DomainError(f"history_window {self.history_window} must be >= 1")

    @classmethod
    def percent_of_history(cls, c_pct: float = DEFAULT_COVERAGE_PCT,
                           history_window: int = DEFAULT_HISTORY_WINDOW) -> "CoveragePolicy":
        return cls(CoverageMode.PERCENT_OF_HISTORY, c_pct=c_pct, history_window=history_window)

    @classmethod
    def stddev_based(cls, c_sigma: float = DEFAULT_COVERAGE_SIGMA,
                     history_window: int = DEFAULT_HISTORY_WINDOW) -> "CoveragePolicy":
        return cls(CoverageMode.STDDEV_BASED, c_sigma=c_sigma, history_window=history_window)


@dataclass(frozen=True)
class UnitYieldRecord:
    """One insured unit's actual yield and production history for a year.

    Yields are generic nonnegative reals; no particular unit is assumed.
    """

    unit_id: str
    geohash4: str
    year: int
    y_actual: float
    y_history: tuple[float, ...] = field(default=())
    unit_acres: float = 1.0

    def __post_init__(self) -> None:
        if self.y_actual < 0:
            raise DomainError(f"unit {self.unit_id}: y_actual {self.y_actual} < 0")
        if any(y < 0 for y in self.y_history):
            raise DomainError(f"unit {self.unit_id}: negative yield in history")
        if self.unit_acres <= 0:
            raise DomainError(f"unit {self.unit_id}: unit_acres {self.unit_acres} <= 0")


@dataclass(frozen=True)
class LossOutcome:
    """Covered loss for one unit-year.

    ``loss`` is in yield units, ``severity`` is the loss as a fraction of
    expected yield. ``claim`` is true exactly when loss > 0.
    """

    loss: float
    claim: bool
    severity: float


def expected_yield(history: list[float] | tuple[float, ...],
                   window: int = DEFAULT_HISTORY_WINDOW) -> float:
    """Arithmetic mean of the most recent ``min(window, len(history))`` yields.

    Histories shorter than the window use all available years.
    """
    if len(history) == 0:
        raise DomainError("cannot compute expected yield from an empty history")
    if window < 1:
        raise DomainError(f"history window {window} must be >= 1")
    recent = history[-window:]
    return float(sum(recent) / len(recent))


def yp_loss(policy: CoveragePolicy, y_expected: float, y_actual: float) -> LossOutcome:
    """Percent-of-history covered loss: ``max(c * y_expected - y_actual, 0)``."""
    if policy.mode is not CoverageMode.PERCENT_OF_HISTORY:
        raise DomainError("yp_loss requires a PERCENT_OF_HISTORY policy")
    if y_actual < 0:
        raise DomainError(f"y_actual {y_actual} < 0")
    if y_expected <= 0:
        raise DomainError(f"y_expected {y_expected} must be > 0")
    loss = max(policy.c_pct * y_expected - y_actual, 0.0)
    severity = loss / y_expected
    return LossOutcome(loss=loss, claim=loss > 0.0, severity=severity)


def severity_from_delta(y_delta_pct: float, c_pct: float) -> float:
    """Loss severity expressed through relative yield change:
    ``max(-y_delta_pct - (1 - c_pct), 0)``.

    Agrees with ``yp_loss(...).severity`` to machine precision for
    ``y_delta_pct = (y_actual - y_expected) / y_expected``.
    """
    return max(-y_delta_pct - (1.0 - c_pct), 0.0)


def claims_indicator(y_delta_pct: float, c_pct: float) -> bool:
    """True exactly when the relative yield change falls below ``c_pct - 1``.

    The inequality is strict: a yield exactly at the guarantee is not a claim.
    """
    if not 0.0 < c_pct <= 1.0:
        raise DomainError(f"c_pct {c_pct} outside (0, 1]")
    return y_delta_pct < c_pct - 1.0


def stddev_loss(policy: CoveragePolicy, y_mu: float, y_sigma: float, y_actual: float,
                variant: str = "sigma_offset") -> LossOutcome:
    """Variance-aware covered loss.

    The default ``sigma_offset`` guarantee is ``y_mu - c_sigma * y_sigma``;
    ``mu_over_sigma`` is a compatibility variant with guarantee
    ``c_sigma * y_mu / y_sigma`` (dimensionally odd, kept selectable only
    for comparison).
    """
    if policy.mode is not CoverageMode.STDDEV_BASED:
        raise DomainError("stddev_loss requires a STDDEV_BASED policy")
    if y_sigma < 0:
        raise DomainError(f"y_sigma {y_sigma} must be nonnegative")
    if y_mu <= 0:
        raise DomainError(f"y_mu {y_mu} must be > 0")
    if y_actual < 0:
        raise DomainError(f"y_actual {y_actual} < 0")
    if variant == "sigma_offset":
        guarantee = y_mu - policy.c_sigma * y_sigma
    elif variant == "mu_over_sigma":
        if y_sigma == 0:
            raise DomainError("mu_over_sigma variant undefined for y_sigma = 0")
        guarantee = policy.c_sigma * y_mu / y_sigma
    else:
        raise DomainError(f"unknown stddev_loss variant {variant!r}")
    loss = max(guarantee - y_actual, 0.0)
    severity = loss / y_mu
    return LossOutcome(loss=loss, claim=loss > 0.0, severity=severity)


def calibrate_c_sigma(target_c_pct: float, mean: float, std: float) -> float:
    """Standard-deviation multiple that matches a percent-of-history guarantee.

    Solves ``mean - c_sigma * std == target_c_pct * mean`` for the yield
    distribution summarized by (mean, std), i.e. ``(1 - c_pct) / cv`` with
    ``cv = std / mean``.
    """
    if not 0.0 < target_c_pct <= 1.0:
        raise DomainError(f"target_c_pct {target_c_pct} outside (0, 1]")
    if std <= 0:
        raise DomainError(f"std {std} must be > 0")
    if mean <= 0:
        raise DomainError(f"mean {mean} must be > 0")
    return (1.0 - target_c_pct) * mean / std


def loss_from_delta(policy: CoveragePolicy, y_delta_pct: float,
                    hist_cv: float | None = None) -> LossOutcome:
    """Covered loss on the relative-change scale (expected yield normalized to 1).

    For STDDEV_BASED policies ``hist_cv`` is the unit's historic coefficient
    of variation (sigma / mu); the guarantee becomes ``-c_sigma * hist_cv``
    on the delta scale.
    """
    if policy.mode is CoverageMode.PERCENT_OF_HISTORY:
        severity = severity_from_delta(y_delta_pct, policy.c_pct)
    else:
        if hist_cv is None:
            raise DomainError("STDDEV_BASED loss_from_delta requires hist_cv")
        if hist_cv < 0:
            raise DomainError(f"hist_cv {hist_cv} must be nonnegative")
        severity = max(-y_delta_pct - policy.c_sigma * hist_cv, 0.0)
    if math.isnan(severity):
        raise DomainError("non-finite severity")
    return LossOutcome(loss=severity, claim=severity > 0.0, severity=severity)
