"""Training, evaluation, and persistence of the two-output regressor.

The model predicts a neighborhood's (mean, std) of yield deltas from
climate features, the year, and historic delta statistics. Inputs are
standardized with statistics fit on the training rows only; an optional
dropped attribute group is zero-masked identically at train and inference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, SchemaError, TrainingDivergenceError
from .features import FeatureSchema
from .network import AdamW, MlpParams, forward, init_params, loss_and_grads, \
    params_from_json, params_to_json

LAYER_MENU = (512, 256, 128, 64, 32, 8)
DROPOUT_MENU = (0.00, 0.01, 0.05, 0.10, 0.50)
L2_MENU = (0.00, 0.05, 0.10, 0.15, 0.20)

DEFAULT_EPOCHS = 200
DEFAULT_PATIENCE = 20
DEFAULT_BATCH_SIZE = 256
DEFAULT_LR = 1e-2

MODEL_SCHEMA_VERSION = "croprisk-model/1"


def layer_sizes_for_depth(n: int) -> tuple[int, ...]:
    """Last ``n`` entries of the size menu, e.g. depth 2 -> (32, 8)."""
    if not 1 <= n <= len(LAYER_MENU):
        raise DomainError(f"depth {n} outside 1..{len(LAYER_MENU)}")
    return LAYER_MENU[-n:]


@dataclass(frozen=True)
class RegressorConfig:
    layer_sizes: tuple[int, ...]
    dropout: float = 0.0
    l2: float = 0.0
    dropped_attribute: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.layer_sizes:
            raise DomainError("layer_sizes must be nonempty")
        if any(b <= 0 for b in self.layer_sizes):
            raise DomainError("layer sizes must be positive")
        if any(a <= b for a, b in zip(self.layer_sizes, self.layer_sizes[1:])):
            raise DomainError(f"layer_sizes {self.layer_sizes} must be strictly decreasing")
        if not 0.0 <= self.dropout < 1.0:
            raise DomainError(f"dropout {self.dropout} outside [0, 1)")
        if self.l2 < 0.0:
            raise DomainError(f"l2 {self.l2} must be nonnegative")

    @classmethod
    def from_depth(cls, depth: int, dropout: float = 0.0, l2: float = 0.0,
                   dropped_attribute: str | None = None, seed: int = 0) -> "RegressorConfig":
        return cls(layer_sizes_for_depth(depth), dropout, l2, dropped_attribute, seed)

    def label(self) -> str:
        dropped = self.dropped_attribute or "all"
        return (f"layers={'x'.join(map(str, self.layer_sizes))}"
                f" dropout={self.dropout} l2={self.l2} drop={dropped}")


@dataclass
class InputNormalization:
    loc: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "InputNormalization":
        loc = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale < 1e-12, 1.0, scale)
        return cls(loc=loc, scale=scale)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.loc) / self.scale


@dataclass
class ResidualSet:
    """Signed residuals (observed - predicted) for the two heads."""

    mean_residuals: np.ndarray
    std_residuals: np.ndarray

    def __post_init__(self) -> None:
        if len(self.mean_residuals) == 0 or len(self.std_residuals) == 0:
            raise DomainError("residual pools must be nonempty")


@dataclass
class TrainedRegressor:
    config: RegressorConfig
    schema: FeatureSchema
    params: MlpParams
    normalization: InputNormalization
    residuals: ResidualSet | None = None
    metrics: dict = field(default_factory=dict)
    best_epoch: int = 0
    val_history: list[float] = field(default_factory=list)

    def predict(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Deterministic inference; std predictions are nonnegative."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != self.schema.n_features:
            raise SchemaError(
                f"input width {X.shape[1]} != schema width {self.schema.n_features}")
        keep = self.schema.group_mask(self.config.dropped_attribute)
        X = np.where(keep, X, 0.0)
        mean_pred, std_pred, _ = forward(self.params, self.normalization.apply(X))
        if single:
            return mean_pred[0], std_pred[0]
        return mean_pred, std_pred


def _lr_scale(epoch: int, total: int) -> float:
    """Cosine decay from 1 to 0.001 across the epoch budget. MAE gradients do
    not shrink near the optimum, so the step size has to."""
    if total <= 1:
        return 1.0
    floor = 1e-3
    return floor + (1.0 - floor) * 0.5 * (1.0 + math.cos(math.pi * epoch / (total - 1)))


def train(config: RegressorConfig, schema: FeatureSchema,
          X_train: np.ndarray, Y_train: np.ndarray,
          X_val: np.ndarray | None = None, Y_val: np.ndarray | None = None,
          epochs: int = DEFAULT_EPOCHS, patience: int = DEFAULT_PATIENCE,
          lr: float = DEFAULT_LR, batch_size: int = DEFAULT_BATCH_SIZE,
          ) -> TrainedRegressor:
    """Fit the network, minimizing summed MAE of both heads plus L2 penalty.

    With a validation set, stops early when validation mean-MAE fails to
    improve for ``patience`` epochs and restores the best parameters; the
    surviving epoch count is recorded for later retraining.
    """
    X_train = np.asarray(X_train, dtype=float)
    Y_train = np.asarray(Y_train, dtype=float)
    if len(X_train) == 0:
        raise DomainError("training set is empty")
    keep = schema.group_mask(config.dropped_attribute)
    X_masked = np.where(keep, X_train, 0.0)
    norm = InputNormalization.fit(X_masked)
    Xn = norm.apply(X_masked)

    has_val = X_val is not None and Y_val is not None and len(X_val) > 0
    if has_val:
        Xv = norm.apply(np.where(keep, np.asarray(X_val, dtype=float), 0.0))
        Yv = np.asarray(Y_val, dtype=float)

    root = np.random.SeedSequence([config.seed, 2024])
    init_ss, shuffle_ss, dropout_ss = root.spawn(3)
    params = init_params(Xn.shape[1], config.layer_sizes, np.random.default_rng(init_ss))
    shuffle_rng = np.random.default_rng(shuffle_ss)
    dropout_rng = np.random.default_rng(dropout_ss)
    optimizer = AdamW(lr=lr)

    best_val = math.inf
    best_params = params.copy()
    best_epoch = 0
    stale = 0
    val_history: list[float] = []
    n = len(Xn)
    for epoch in range(1, epochs + 1):
        order = shuffle_rng.permutation(n)
        scale = _lr_scale(epoch - 1, epochs)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            loss, grads = loss_and_grads(
                params, Xn[idx], Y_train[idx], config.l2,
                dropout_rate=config.dropout, dropout_rng=dropout_rng)
            if not math.isfinite(loss):
                raise TrainingDivergenceError(epoch)
            optimizer.step(params, grads, lr_scale=scale)
        if has_val:
            mean_pred, _, _ = forward(params, Xv)
            val_mae = float(np.mean(np.abs(mean_pred - Yv[:, 0])))
            val_history.append(val_mae)
            if val_mae < best_val - 1e-12:
                best_val = val_mae
                best_params = params.copy()
                best_epoch = epoch
                stale = 0
            else:
                stale += 1
                if stale >= patience:
                    break
    if has_val:
        params = best_params
    else:
        best_epoch = epochs

    model = TrainedRegressor(config=config, schema=schema, params=params,
                             normalization=norm, best_epoch=best_epoch,
                             val_history=val_history)
    model.metrics["train"] = evaluate(model, X_train, Y_train)
    if has_val:
        model.metrics["validation"] = evaluate(model, np.asarray(X_val), np.asarray(Y_val))
    return model


def evaluate(model: TrainedRegressor, X: np.ndarray, Y: np.ndarray) -> dict[str, float]:
    """MAE of the mean and std heads against observed neighborhood moments."""
    if len(X) == 0:
        raise DomainError("cannot evaluate on empty rows")
    mean_pred, std_pred = model.predict(X)
    Y = np.asarray(Y, dtype=float)
    return {
        "mae_mean": float(np.mean(np.abs(mean_pred - Y[:, 0]))),
        "mae_std": float(np.mean(np.abs(std_pred - Y[:, 1]))),
    }


def extract_residuals(model: TrainedRegressor, X: np.ndarray, Y: np.ndarray) -> ResidualSet:
    """Signed residuals (observed - predicted) for Monte Carlo resampling."""
    if len(X) == 0:
        raise DomainError("cannot extract residuals from empty rows")
    mean_pred, std_pred = model.predict(X)
    Y = np.asarray(Y, dtype=float)
    return ResidualSet(mean_residuals=Y[:, 0] - mean_pred,
                       std_residuals=Y[:, 1] - std_pred)


def save_model(model: TrainedRegressor, path: str | Path) -> None:
    payload = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "config": {
            "layer_sizes": list(model.config.layer_sizes),
            "dropout": model.config.dropout,
            "l2": model.config.l2,
            "dropped_attribute": model.config.dropped_attribute,
            "seed": model.config.seed,
        },
        "feature_schema": model.schema.to_dict(),
        "params": params_to_json(model.params),
        "normalization": {
            "loc": model.normalization.loc.tolist(),
            "scale": model.normalization.scale.tolist(),
        },
        "residuals": None if model.residuals is None else {
            "mean": model.residuals.mean_residuals.tolist(),
            "std": model.residuals.std_residuals.tolist(),
        },
        "metrics": model.metrics,
        "best_epoch": model.best_epoch,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_model(path: str | Path) -> TrainedRegressor:
    with open(path) as fh:
        payload = json.load(fh)
    version = payload.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise SchemaError(
            f"model file version {version!r} does not match {MODEL_SCHEMA_VERSION!r}")
    cfg = payload["config"]
    config = RegressorConfig(
        layer_sizes=tuple(cfg["layer_sizes"]), dropout=cfg["dropout"], l2=cfg["l2"],
        dropped_attribute=cfg["dropped_attribute"], seed=cfg["seed"])
    residuals = None
    if payload["residuals"] is not None:
        residuals = ResidualSet(
            mean_residuals=np.asarray(payload["residuals"]["mean"], dtype=float),
            std_residuals=np.asarray(payload["residuals"]["std"], dtype=float))
    return TrainedRegressor(
        config=config,
        schema=FeatureSchema.from_dict(payload["feature_schema"]),
        params=params_from_json(payload["params"]),
        normalization=InputNormalization(
            loc=np.asarray(payload["normalization"]["loc"], dtype=float),
            scale=np.asarray(payload["normalization"]["scale"], dtype=float)),
        residuals=residuals,
        metrics=payload.get("metrics", {}),
        best_epoch=payload.get("best_epoch", 0),
    )
