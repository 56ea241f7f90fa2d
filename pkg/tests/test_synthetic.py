import numpy as np
import pytest

from croprisk.features import build_table
from croprisk.pipeline import ScenarioId, compute_yield_delta, summarize_neighborhood
from croprisk.insurance import expected_yield
from croprisk.synthetic import SyntheticConfig, generate_synthetic, make_scenario_series


def dataset_fingerprint(ds) -> tuple:
    summary_bits = tuple((s.geohash4, s.year, s.mean_delta, s.std_delta)
                         for s in ds.summaries)
    yield_bits = tuple((r.unit_id, r.y_actual, r.y_history) for r in ds.yields[:50])
    return summary_bits + yield_bits


class TestDeterminism:
    def test_same_seed_identical(self):
        cfg = SyntheticConfig(seed=3, n_neighborhoods=5,
                              years=tuple(range(2000, 2004)),
                              units_per_neighborhood=6)
        a = generate_synthetic(cfg)
        b = generate_synthetic(cfg)
        assert dataset_fingerprint(a) == dataset_fingerprint(b)

    def test_different_seed_differs(self):
        base = SyntheticConfig(seed=3, n_neighborhoods=5,
                               years=tuple(range(2000, 2004)),
                               units_per_neighborhood=6)
        other = SyntheticConfig(seed=4, n_neighborhoods=5,
                                years=tuple(range(2000, 2004)),
                                units_per_neighborhood=6)
        assert dataset_fingerprint(generate_synthetic(base)) != \
            dataset_fingerprint(generate_synthetic(other))


class TestShapes:
    def test_summary_grid(self):
        cfg = SyntheticConfig(seed=7, n_neighborhoods=50,
                              years=tuple(range(2000, 2017)))
        ds = generate_synthetic(cfg, include_units=False)
        assert len(ds.summaries) == 50 * 17
        assert len(ds.climate) == 50 * 17
        assert len({s.geohash4 for s in ds.summaries}) == 50

    def test_feature_vector_width_constant(self, noiseless_dataset):
        ds = noiseless_dataset
        widths = {len(fs.features) for fs in ds.climate}
        assert widths == {len(ds.schema.climate_keys)}


class TestTruthRecovery:
    def test_noiseless_targets_match_truth_exactly(self, noiseless_dataset):
        ds = noiseless_dataset
        by_key = {(fs.geohash4, fs.year): fs for fs in ds.climate}
        for s in ds.summaries[:200]:
            fs = by_key[(s.geohash4, s.year)]
            cvec = np.array([fs.features[k] for k in ds.schema.climate_keys])
            z_mu, z_sigma = ds.z_stats[s.geohash4]
            x = np.concatenate([cvec, [float(s.year), z_mu, z_sigma]])
            assert s.mean_delta == pytest.approx(ds.truth.target_mean(x), abs=1e-12)
            assert s.std_delta == pytest.approx(ds.truth.target_std(x), abs=1e-12)

    def test_units_consistent_with_their_histories(self, small_dataset_with_units):
        ds = small_dataset_with_units
        for record in ds.yields[:100]:
            mu = expected_yield(record.y_history)
            delta = compute_yield_delta(record.y_actual, mu)
            assert -1.0 <= delta <= 3.0

    def test_unit_deltas_recover_summary_moments(self, small_dataset_with_units):
        ds = small_dataset_with_units
        truth_by_key = {(s.geohash4, s.year): s for s in ds.summaries}
        errs = []
        by_key = {}
        for r in ds.yields:
            by_key.setdefault((r.geohash4, r.year), []).append(r)
        for key, rows in by_key.items():
            deltas = [compute_yield_delta(r.y_actual, expected_yield(r.y_history))
                      for r in rows]
            observed = summarize_neighborhood(deltas, key[0], key[1])
            errs.append(abs(observed.mean_delta - truth_by_key[key].mean_delta))
        # 12 units per neighborhood: sampling error ~ std/sqrt(12) ~ 0.04
        assert float(np.mean(errs)) < 0.08


class TestScenarioSeries:
    def test_counterfactual_matches_base_draws(self, noiseless_dataset):
        ds = noiseless_dataset
        cf = make_scenario_series(ds, ScenarioId.COUNTERFACTUAL_2050)
        ssp = make_scenario_series(ds, ScenarioId.SSP245_2050)
        assert cf.years == ssp.years
        cf_by = {(fs.geohash4, fs.year): fs for fs in cf.climate}
        # shared base draws: the ssp set differs from the counterfactual by a
        # deterministic shift, larger for more stressed neighborhoods
        diffs = {}
        for fs in ssp.climate:
            twin = cf_by[(fs.geohash4, fs.year)]
            gap = np.array([fs.features[k] - twin.features[k]
                            for k in ds.schema.climate_keys])
            diffs[fs.geohash4] = float(np.linalg.norm(gap))
        stressed = max(ds.stress, key=ds.stress.get)
        relaxed = min(ds.stress, key=ds.stress.get)
        assert diffs[stressed] > diffs[relaxed]

    def test_warming_widens_predicted_std(self, noiseless_dataset):
        ds = noiseless_dataset
        cf = make_scenario_series(ds, ScenarioId.COUNTERFACTUAL_2050)
        ssp = make_scenario_series(ds, ScenarioId.SSP245_2050)
        cf_by = {(fs.geohash4, fs.year): fs for fs in cf.climate}

        def target(fs):
            cvec = np.array([fs.features[k] for k in ds.schema.climate_keys])
            z_mu, z_sigma = ds.z_stats[fs.geohash4]
            x = np.concatenate([cvec, [float(fs.year), z_mu, z_sigma]])
            return ds.truth.target_mean(x), ds.truth.target_std(x)

        mean_gaps, std_gaps = [], []
        for fs in ssp.climate:
            m_ssp, s_ssp = target(fs)
            m_cf, s_cf = target(cf_by[(fs.geohash4, fs.year)])
            mean_gaps.append(m_ssp - m_cf)
            std_gaps.append(s_ssp - s_cf)
        assert float(np.mean(std_gaps)) > 0.01      # volatility rises
        assert float(np.mean(mean_gaps)) < 0.0      # yield gains erode

    def test_2050_shift_exceeds_2030(self, noiseless_dataset):
        ds = noiseless_dataset
        gaps = {}
        for year, scenario in ((2030, ScenarioId.SSP245_2030),
                               (2050, ScenarioId.SSP245_2050)):
            cf = make_scenario_series(
                ds, ScenarioId(f"counterfactual_{year}"))
            ssp = make_scenario_series(ds, scenario)
            cf_by = {(fs.geohash4, fs.year): fs for fs in cf.climate}
            total = 0.0
            for fs in ssp.climate:
                twin = cf_by[(fs.geohash4, fs.year)]
                gap = np.array([fs.features[k] - twin.features[k]
                                for k in ds.schema.climate_keys])
                total += float(np.linalg.norm(gap))
            gaps[year] = total
        assert gaps[2050] > gaps[2030]

    def test_series_is_deterministic(self, noiseless_dataset):
        a = make_scenario_series(noiseless_dataset, ScenarioId.SSP245_2030)
        b = make_scenario_series(noiseless_dataset, ScenarioId.SSP245_2030)
        assert [fs.features for fs in a.climate] == [fs.features for fs in b.climate]


class TestTableJoin:
    def test_build_table_joins_all_rows(self, noiseless_dataset):
        ds = noiseless_dataset
        table = build_table(ds.summaries, ds.climate, ds.schema, ds.z_stats)
        assert len(table) == len(ds.summaries)
        assert table.X.shape == (len(ds.summaries), ds.schema.n_features)
        assert table.Y.shape == (len(ds.summaries), 2)
        assert (table.acres > 0).all()
