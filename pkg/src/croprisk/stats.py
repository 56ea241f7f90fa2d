"""Nonparametric significance and correlation machinery.

The rank-sum test uses midranks for ties and reports a two-sided p-value.
Small pooled samples (n1 + n2 <= EXACT_LIMIT) are evaluated against the
exact permutation null via a subset-sum count over doubled midranks; larger
samples use the normal approximation with tie-corrected variance and a
continuity correction. The plain normal approximation is too coarse for
tiny samples (e.g. two fully separated pairs: exact p = 1/3 vs ~0.245), so
the hybrid keeps small-sample p-values honest while staying O(n log n) at
simulation scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EXACT_LIMIT = 20


@dataclass(frozen=True)
class MwuResult:
    u_statistic: float
    p_value: float
    n1: int
    n2: int
    method: str


@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    p_value: float
    n: int


def midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties assigned the mean of their rank positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(sorted_vals):
        j = i
        while j + 1 < len(sorted_vals) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_counts(pooled_sorted: np.ndarray) -> list[int]:
    counts = []
    i = 0
    n = len(pooled_sorted)
    while i < n:
        j = i
        while j + 1 < n and pooled_sorted[j + 1] == pooled_sorted[i]:
            j += 1
        counts.append(j - i + 1)
        i = j + 1
    return counts


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _exact_two_sided_p(ranks2: np.ndarray, n1: int, r1_doubled: int) -> float:
    """Exact two-sided p over all choose(n, n1) labelings.

    ``ranks2`` are pooled midranks doubled to integers; ``r1_doubled`` is the
    observed doubled rank sum of sample 1. Counts subsets by dynamic
    programming over (subset size, doubled rank sum).
    """
    n = len(ranks2)
    total_sum = int(ranks2.sum())
    # counts[k][s]: number of k-subsets with doubled rank sum s.
    # k descends so an item is never reused within its own update.
    counts = np.zeros((n1 + 1, total_sum + 1), dtype=float)
    counts[0, 0] = 1.0
    for r in ranks2:
        r = int(r)
        for k in range(n1, 0, -1):
            counts[k, r:] += counts[k - 1, :total_sum + 1 - r]
    dist = counts[n1]
    n_subsets = dist.sum()
    # Center of the doubled rank-sum distribution is n1 * (n + 1), an integer,
    # so deviations compare exactly.
    center = n1 * (n + 1)
    dev_obs = abs(r1_doubled - center)
    sums = np.arange(total_sum + 1)
    tail = dist[np.abs(sums - center) >= dev_obs].sum()
    return float(tail / n_subsets)


def _asymptotic_two_sided_p(u1: float, n1: int, n2: int, tie_counts: list[int]) -> float:
    n = n1 + n2
    mu = n1 * n2 / 2.0
    tie_term = sum(t**3 - t for t in tie_counts)
    if n < 2:
        return 1.0
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0:
        return 1.0  # all pooled values identical: no evidence of separation
    z = (abs(u1 - mu) - 0.5) / math.sqrt(var)
    if z < 0:
        z = 0.0
    return min(1.0, 2.0 * _norm_sf(z))


def mann_whitney_u(a, b, method: str = "auto") -> MwuResult:
    """Two-sided rank-sum test of samples ``a`` and ``b``.

    ``method``: "auto" picks "exact" when n1 + n2 <= EXACT_LIMIT, else
    "asymptotic". The reported U statistic is for sample ``a``; swapping the
    samples maps U to n1*n2 - U with an identical p-value.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 1 or n2 < 1:
        raise DomainError("both samples must be nonempty")
    if method not in ("auto", "exact", "asymptotic"):
        raise DomainError(f"unknown method {method!r}")
    pooled = np.concatenate([a, b])
    ranks = midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0

    resolved = method
    if method == "auto":
        resolved = "exact" if n1 + n2 <= EXACT_LIMIT else "asymptotic"
    if resolved == "exact":
        ranks2 = np.rint(ranks * 2).astype(int)
        p = _exact_two_sided_p(ranks2, n1, int(round(r1 * 2)))
    else:
        p = _asymptotic_two_sided_p(u1, n1, n2, _tie_counts(np.sort(pooled)))
    return MwuResult(u_statistic=u1, p_value=p, n1=n1, n2=n2, method=resolved)


def bonferroni_threshold(alpha: float, n_tests: int) -> float:
    """Per-test significance cutoff ``alpha / n_tests``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha {alpha} outside (0, 1)")
    if n_tests < 1:
        raise DomainError(f"n_tests {n_tests} must be >= 1")
    return alpha / n_tests


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularized incomplete beta (Lentz's method)."""
    max_iter = 300
    eps = 3e-16
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def _reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _t_sf(t: float, df: float) -> float:
    """Survival function of Student's t."""
    if t < 0:
        return 1.0 - _t_sf(-t, df)
    x = df / (df + t * t)
    return 0.5 * _reg_inc_beta(df / 2.0, 0.5, x)


def spearman_rho(x, y) -> SpearmanResult:
    """Spearman rank correlation: Pearson correlation of midranks.

    p-value via the t approximation with n - 2 degrees of freedom.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise DomainError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise DomainError(f"need at least 3 pairs, got {n}")
    rx = midranks(x)
    ry = midranks(y)
    rx_c = rx - rx.mean()
    ry_c = ry - ry.mean()
    denom = math.sqrt(float(rx_c @ rx_c) * float(ry_c @ ry_c))
    if denom == 0.0:
        raise DomainError("rank correlation undefined for a constant input vector")
    rho = float(rx_c @ ry_c) / denom
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p = min(1.0, 2.0 * _t_sf(abs(t), n - 2))
    return SpearmanResult(rho=rho, p_value=p, n=n)
