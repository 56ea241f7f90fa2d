import itertools
import math

import numpy as np
import pytest
from scipy import stats as sps

from croprisk.errors import DomainError
from croprisk.stats import bonferroni_threshold, mann_whitney_u, midranks, spearman_rho


def permutation_p(a, b) -> float:
    """Independent oracle: exhaustive relabeling with the pairwise-count U.

    Uses a different U formula (pairwise wins plus half-ties) and explicit
    itertools enumeration, sharing no code with the production path.
    """
    pooled = list(a) + list(b)
    n1, n = len(a), len(a) + len(b)
    mu = n1 * (n - n1) / 2.0

    def u_of(indices: set) -> float:
        u = 0.0
        for i in indices:
            for j in range(n):
                if j in indices:
                    continue
                if pooled[i] > pooled[j]:
                    u += 1.0
                elif pooled[i] == pooled[j]:
                    u += 0.5
        return u

    dev_obs = abs(u_of(set(range(n1))) - mu)
    hits = total = 0
    for combo in itertools.combinations(range(n), n1):
        total += 1
        if abs(u_of(set(combo)) - mu) >= dev_obs - 1e-9:
            hits += 1
    return hits / total


class TestMannWhitney:
    def test_fully_separated_samples(self):
        result = mann_whitney_u([1, 2, 3], [4, 5, 6])
        assert result.u_statistic == 0.0
        # 2 of the C(6,3)=20 labelings are as extreme
        assert result.p_value == pytest.approx(0.1)

    def test_identical_samples(self):
        result = mann_whitney_u([1, 2, 5], [1, 2, 5])
        assert result.p_value == 1.0

    def test_tied_midranks(self):
        pooled = np.array([1, 2, 1, 2], dtype=float)
        assert midranks(pooled).tolist() == [1.5, 3.5, 1.5, 3.5]
        result = mann_whitney_u([1, 2], [1, 2])
        assert result.u_statistic == 2.0

    def test_swap_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = rng.integers(0, 10, size=rng.integers(1, 8)).tolist()
            b = rng.integers(0, 10, size=rng.integers(1, 8)).tolist()
            fwd = mann_whitney_u(a, b)
            rev = mann_whitney_u(b, a)
            assert fwd.u_statistic == pytest.approx(fwd.n1 * fwd.n2 - rev.u_statistic)
            assert fwd.p_value == pytest.approx(rev.p_value)

    def test_matches_permutation_oracle_small_samples(self):
        rng = np.random.default_rng(6)
        for _ in range(120):
            n1 = int(rng.integers(1, 11))
            n2 = int(rng.integers(1, 13 - n1))
            a = rng.integers(-4, 5, size=n1).tolist()
            b = rng.integers(-4, 5, size=n2).tolist()
            mine = mann_whitney_u(a, b).p_value
            assert abs(mine - permutation_p(a, b)) <= 0.02

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(7)
        a = rng.normal(0, 1, 9).tolist()
        b = rng.normal(0.4, 1.3, 8).tolist()
        base = mann_whitney_u(a, b)
        for f in (lambda x: x**3, math.exp, lambda x: 5 * x + 2):
            mapped = mann_whitney_u([f(x) for x in a], [f(x) for x in b])
            assert mapped.u_statistic == base.u_statistic
            assert mapped.p_value == base.p_value

    def test_asymptotic_matches_scipy(self):
        rng = np.random.default_rng(8)
        a = rng.normal(0, 1, 40)
        b = rng.normal(0.3, 1.5, 35)
        mine = mann_whitney_u(a, b, method="asymptotic")
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
        assert mine.p_value == pytest.approx(ref.pvalue, rel=1e-9)

    def test_asymptotic_close_to_exact_at_moderate_n(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            a = rng.integers(0, 12, size=10).tolist()
            b = rng.integers(0, 12, size=10).tolist()
            exact = mann_whitney_u(a, b, method="exact").p_value
            asym = mann_whitney_u(a, b, method="asymptotic").p_value
            assert abs(exact - asym) <= 0.03

    def test_degenerate_all_identical(self):
        result = mann_whitney_u([3, 3, 3] * 10, [3, 3] * 12, method="asymptotic")
        assert result.p_value == 1.0

    def test_empty_sample_rejected(self):
        with pytest.raises(DomainError):
            mann_whitney_u([], [1, 2])

    def test_u_never_exceeds_product(self):
        rng = np.random.default_rng(10)
        for _ in range(60):
            a = rng.normal(size=rng.integers(1, 9))
            b = rng.normal(size=rng.integers(1, 9))
            result = mann_whitney_u(a, b)
            assert 0.0 <= result.u_statistic <= result.n1 * result.n2
            assert 0.0 <= result.p_value <= 1.0


class TestBonferroni:
    def test_single_test_identity(self):
        assert bonferroni_threshold(0.05, 1) == 0.05

    def test_two_tests(self):
        assert bonferroni_threshold(0.05, 2) == 0.025

    def test_many_tests(self):
        assert bonferroni_threshold(0.05, 500) == pytest.approx(1e-4)

    def test_zero_tests_rejected(self):
        with pytest.raises(DomainError):
            bonferroni_threshold(0.05, 0)

    def test_strictly_decreasing(self):
        values = [bonferroni_threshold(0.05, n) for n in range(1, 40)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestSpearman:
    def test_perfectly_increasing(self):
        assert spearman_rho([1, 2, 3, 4], [10, 20, 30, 40]).rho == 1.0

    def test_perfectly_decreasing(self):
        assert spearman_rho([1, 2, 3, 4], [9, 7, 5, 3]).rho == -1.0

    def test_hand_ranked_example(self):
        # ranks are the values themselves; sum of squared rank gaps is 4,
        # so rho = 1 - 6*4 / (5 * 24) = 0.8
        result = spearman_rho([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])
        assert result.rho == pytest.approx(0.8)

    def test_matches_scipy(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(4, 40))
            x = rng.normal(size=n)
            y = 0.5 * x + rng.normal(size=n)
            mine = spearman_rho(x, y)
            ref = sps.spearmanr(x, y)
            assert mine.rho == pytest.approx(ref.statistic, abs=1e-12)
            assert mine.p_value == pytest.approx(ref.pvalue, rel=1e-6)

    def test_ties_match_scipy(self):
        x = [1, 1, 2, 3, 3, 3, 4]
        y = [2, 3, 3, 5, 4, 4, 7]
        mine = spearman_rho(x, y)
        ref = sps.spearmanr(x, y)
        assert mine.rho == pytest.approx(ref.statistic, abs=1e-12)
        assert mine.p_value == pytest.approx(ref.pvalue, rel=1e-6)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=15)
        y = rng.normal(size=15)
        base = spearman_rho(x, y)
        mapped = spearman_rho(np.exp(x), y**3)
        assert mapped.rho == pytest.approx(base.rho)
        assert mapped.p_value == pytest.approx(base.p_value)

    def test_constant_vector_rejected(self):
        with pytest.raises(DomainError):
            spearman_rho([1, 1, 1, 1], [1, 2, 3, 4])

    def test_length_mismatch_rejected(self):
        with pytest.raises(DomainError):
            spearman_rho([1, 2, 3], [1, 2])

    def test_too_short_rejected(self):
        with pytest.raises(DomainError):
            spearman_rho([1, 2], [2, 1])
