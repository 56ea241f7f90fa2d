import numpy as np
import pytest

from croprisk.errors import DomainError, SchemaError, TrainingDivergenceError
from croprisk.features import build_table
from croprisk.regressor import RegressorConfig, evaluate, extract_residuals, \
    layer_sizes_for_depth, load_model, save_model, train
from croprisk.sweep import SplitKind, SplitSpec, make_split

from conftest import TINY_SCHEMA, constant_model


class TestConfig:
    def test_depth_menu(self):
        assert layer_sizes_for_depth(1) == (8,)
        assert layer_sizes_for_depth(2) == (32, 8)
        assert layer_sizes_for_depth(3) == (64, 32, 8)
        assert layer_sizes_for_depth(4) == (128, 64, 32, 8)
        assert layer_sizes_for_depth(6) == (512, 256, 128, 64, 32, 8)

    def test_validation(self):
        with pytest.raises(DomainError):
            RegressorConfig(layer_sizes=(8, 32))
        with pytest.raises(DomainError):
            RegressorConfig(layer_sizes=(32, 8), dropout=1.0)
        with pytest.raises(DomainError):
            RegressorConfig(layer_sizes=(32, 8), l2=-0.1)
        with pytest.raises(DomainError):
            RegressorConfig(layer_sizes=())


def toy_rows(n=120, d=None, seed=28):
    schema = TINY_SCHEMA
    d = schema.n_features
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    X[:, -3] = 2005.0 + rng.integers(0, 10, size=n)  # year column
    w = rng.normal(0, 0.05, size=d)
    Y = np.stack([(X - X.mean(axis=0)) @ w, np.full(n, 0.14)], axis=1)
    return schema, X, Y


class TestTrain:
    def test_constant_target_converges_to_bias(self):
        schema, X, _ = toy_rows()
        Y = np.stack([np.full(len(X), 0.07), np.full(len(X), 0.12)], axis=1)
        config = RegressorConfig(layer_sizes=(8,), seed=1)
        model = train(config, schema, X, Y, epochs=400, batch_size=32)
        assert model.metrics["train"]["mae_mean"] < 1e-3
        assert model.metrics["train"]["mae_std"] < 1e-3

    def test_same_seed_identical_weights(self):
        schema, X, Y = toy_rows()
        config = RegressorConfig(layer_sizes=(32, 8), dropout=0.05, seed=5)
        a = train(config, schema, X, Y, epochs=20)
        b = train(config, schema, X, Y, epochs=20)
        assert np.array_equal(a.params.flat(), b.params.flat())

    def test_different_seed_differs(self):
        schema, X, Y = toy_rows()
        a = train(RegressorConfig(layer_sizes=(8,), seed=1), schema, X, Y, epochs=10)
        b = train(RegressorConfig(layer_sizes=(8,), seed=2), schema, X, Y, epochs=10)
        assert not np.array_equal(a.params.flat(), b.params.flat())

    def test_divergence_reports_epoch(self):
        schema, X, Y = toy_rows()
        X = X.copy()
        X[0, 0] = np.nan  # poisoned inputs surface as a non-finite loss
        config = RegressorConfig(layer_sizes=(8,), seed=1)
        with pytest.raises(TrainingDivergenceError) as err:
            train(config, schema, X, Y, epochs=5)
        assert err.value.epoch == 1
        assert "epoch 1" in str(err.value)

    def test_empty_train_rejected(self):
        schema, X, Y = toy_rows()
        with pytest.raises(DomainError):
            train(RegressorConfig(layer_sizes=(8,), seed=0), schema,
                  X[:0], Y[:0], epochs=1)

    def test_noiseless_synthetic_reaches_target(self, noiseless_dataset):
        ds = noiseless_dataset
        table = build_table(ds.summaries, ds.climate, ds.schema, ds.z_stats)
        split = make_split(SplitSpec(kind=SplitKind.SWEEP_TEMPORAL), table)
        config = RegressorConfig(layer_sizes=(8,), seed=1)
        model = train(config, table.schema,
                      table.X[split.train_idx], table.Y[split.train_idx],
                      table.X[split.val_idx], table.Y[split.val_idx],
                      epochs=500, patience=100)
        assert model.metrics["validation"]["mae_mean"] <= 0.01


class TestPredict:
    def test_std_always_nonnegative(self):
        schema, X, Y = toy_rows()
        model = train(RegressorConfig(layer_sizes=(8,), seed=3), schema, X, Y, epochs=30)
        _, std_pred = model.predict(X * 10 - 5)
        assert (std_pred >= 0).all()

    def test_width_mismatch_rejected(self):
        model = constant_model(TINY_SCHEMA, 0.0, 0.1)
        with pytest.raises(SchemaError):
            model.predict(np.zeros((2, TINY_SCHEMA.n_features + 1)))

    def test_attribute_drop_ignores_group(self):
        schema, X, Y = toy_rows()
        config = RegressorConfig(layer_sizes=(16, 8), dropped_attribute="year", seed=4)
        model = train(config, schema, X, Y, epochs=20)
        year_col = len(schema.climate_keys)
        X2 = X.copy()
        X2[:, year_col] = 1987.0
        a_mean, a_std = model.predict(X)
        b_mean, b_std = model.predict(X2)
        assert np.array_equal(a_mean, b_mean)
        assert np.array_equal(a_std, b_std)

    def test_climate_group_drop_covers_all_stats(self):
        schema, X, Y = toy_rows()
        config = RegressorConfig(layer_sizes=(8,), dropped_attribute="precipitation",
                                 seed=4)
        model = train(config, schema, X, Y, epochs=10)
        X2 = X.copy()
        idx = [i for i, (v, _, _) in enumerate(schema.climate_keys)
               if v == "precipitation"]
        X2[:, idx] += 99.0
        assert np.array_equal(model.predict(X)[0], model.predict(X2)[0])

    def test_unknown_group_rejected(self):
        schema, X, Y = toy_rows()
        config = RegressorConfig(layer_sizes=(8,), dropped_attribute="sunspots", seed=0)
        with pytest.raises(SchemaError):
            train(config, schema, X, Y, epochs=1)


class TestEvaluateAndResiduals:
    def test_perfect_predictions_zero_error(self):
        model = constant_model(TINY_SCHEMA, 0.05, 0.2)
        X = np.zeros((4, TINY_SCHEMA.n_features))
        Y = np.stack([np.full(4, 0.05), np.full(4, 0.2)], axis=1)
        metrics = evaluate(model, X, Y)
        assert metrics["mae_mean"] == pytest.approx(0.0, abs=1e-12)
        assert metrics["mae_std"] == pytest.approx(0.0, abs=1e-12)
        residuals = extract_residuals(model, X, Y)
        assert np.allclose(residuals.mean_residuals, 0.0, atol=1e-12)

    def test_constant_offset_appears_in_mae(self):
        model = constant_model(TINY_SCHEMA, 0.0, 0.2)
        X = np.zeros((6, TINY_SCHEMA.n_features))
        Y = np.stack([np.full(6, 0.05), np.full(6, 0.2)], axis=1)
        assert evaluate(model, X, Y)["mae_mean"] == pytest.approx(0.05)

    def test_residual_sign_convention(self):
        # observed minus predicted: a model biased +b yields residuals -b
        model = constant_model(TINY_SCHEMA, 0.1, 0.2)
        X = np.zeros((5, TINY_SCHEMA.n_features))
        Y = np.stack([np.zeros(5), np.full(5, 0.2)], axis=1)
        residuals = extract_residuals(model, X, Y)
        assert np.allclose(residuals.mean_residuals, -0.1)

    def test_near_zero_residual_mean_after_fit(self):
        schema, X, Y = toy_rows(n=240)
        model = train(RegressorConfig(layer_sizes=(8,), seed=6), schema, X, Y,
                      epochs=400, batch_size=32)
        residuals = extract_residuals(model, X, Y)
        se = Y[:, 0].std() / np.sqrt(len(X))
        assert abs(residuals.mean_residuals.mean()) <= 3 * se

    def test_empty_rows_rejected(self):
        model = constant_model(TINY_SCHEMA, 0.0, 0.1)
        with pytest.raises(DomainError):
            evaluate(model, np.zeros((0, TINY_SCHEMA.n_features)), np.zeros((0, 2)))


class TestSerialization:
    def test_roundtrip_preserves_predictions(self, tmp_path):
        schema, X, Y = toy_rows()
        model = train(RegressorConfig(layer_sizes=(16, 8), l2=0.05, seed=9),
                      schema, X, Y, epochs=15)
        model.residuals = extract_residuals(model, X, Y)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        a_mean, a_std = model.predict(X)
        b_mean, b_std = loaded.predict(X)
        assert np.array_equal(a_mean, b_mean)
        assert np.array_equal(a_std, b_std)
        assert loaded.config == model.config
        assert np.array_equal(loaded.residuals.mean_residuals,
                              model.residuals.mean_residuals)

    def test_version_mismatch_fails_loudly(self, tmp_path):
        schema, X, Y = toy_rows()
        model = train(RegressorConfig(layer_sizes=(8,), seed=9), schema, X, Y, epochs=2)
        path = tmp_path / "model.json"
        save_model(model, path)
        import json
        payload = json.loads(path.read_text())
        payload["schema_version"] = "croprisk-model/999"
        path.write_text(json.dumps(payload))
        with pytest.raises(SchemaError):
            load_model(path)
