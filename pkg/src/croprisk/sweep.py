"""Dataset splits and the hyper-parameter grid sweep.

The selection split trains on 1999-2012, validates on {2014, 2016} to rank
candidates, and holds out {2013, 2015} as a fully hidden test set. Post-hoc
splits (temporal, spatial by 3-character region, random by row) retrain the
chosen configuration on larger training sets.
"""

from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, SplitError
from .features import RegressionTable, attr_drop_groups
from .regressor import DEFAULT_BATCH_SIZE, DEFAULT_EPOCHS, DEFAULT_LR, \
    DEFAULT_PATIENCE, DROPOUT_MENU, L2_MENU, RegressorConfig, TrainedRegressor, \
    evaluate, extract_residuals, train


class SplitKind(enum.Enum):
    SWEEP_TEMPORAL = "sweep_temporal"
    TEMPORAL = "temporal"
    SPATIAL = "spatial"
    RANDOM = "random"


@dataclass(frozen=True)
class SplitSpec:
    kind: SplitKind
    train_years: tuple[int, ...] = tuple(range(1999, 2013))
    val_years: tuple[int, ...] = (2014, 2016)
    test_years: tuple[int, ...] = (2013, 2015)
    temporal_train_years: tuple[int, ...] = tuple(range(1999, 2014))
    temporal_test_years: tuple[int, ...] = (2014, 2015, 2016)
    train_fraction: float = 0.75
    seed: int = 0


@dataclass
class Split:
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray

    def check_partition(self, n: int) -> bool:
        combined = np.concatenate([self.train_idx, self.val_idx, self.test_idx])
        return len(combined) == n and len(np.unique(combined)) == n


def _year_mask(years: np.ndarray, wanted: Sequence[int], label: str) -> np.ndarray:
    present = set(int(y) for y in np.unique(years))
    absent = [y for y in wanted if y not in present]
    if absent:
        raise SplitError(f"{label} years {absent} absent from dataset (has {sorted(present)})")
    return np.isin(years, list(wanted))


def make_split(spec: SplitSpec, table: RegressionTable) -> Split:
    """Partition table rows according to the split kind.

    Train/validation/test are disjoint; kinds without a validation role
    return an empty validation index.
    """
    years = table.years
    n = len(table)
    empty = np.array([], dtype=int)
    if spec.kind is SplitKind.SWEEP_TEMPORAL:
        train = _year_mask(years, spec.train_years, "train")
        val = _year_mask(years, spec.val_years, "validation")
        test = _year_mask(years, spec.test_years, "test")
        return Split(np.flatnonzero(train), np.flatnonzero(val), np.flatnonzero(test))
    if spec.kind is SplitKind.TEMPORAL:
        train = _year_mask(years, spec.temporal_train_years, "train")
        test = _year_mask(years, spec.temporal_test_years, "test")
        return Split(np.flatnonzero(train), empty, np.flatnonzero(test))
    if spec.kind is SplitKind.SPATIAL:
        regions = sorted(set(table.regions))
        if not regions:
            raise SplitError("dataset has no regions")
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 3]))
        shuffled = list(rng.permutation(regions))
        n_train = int(round(spec.train_fraction * len(regions)))
        n_train = min(max(n_train, 1), len(regions) - 1) if len(regions) > 1 else 1
        train_regions = set(shuffled[:n_train])
        row_regions = np.asarray(table.regions)
        train = np.isin(row_regions, list(train_regions))
        return Split(np.flatnonzero(train), empty, np.flatnonzero(~train))
    if spec.kind is SplitKind.RANDOM:
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 4]))
        order = rng.permutation(n)
        n_train = int(round(spec.train_fraction * n))
        return Split(np.sort(order[:n_train]), empty, np.sort(order[n_train:]))
    raise SplitError(f"unknown split kind {spec.kind}")


def build_grid(depths: Sequence[int] = tuple(range(1, 7)),
               dropouts: Sequence[float] = DROPOUT_MENU,
               l2s: Sequence[float] = L2_MENU,
               attr_drops: Sequence[str | None] | None = None,
               variables: Sequence[str] | None = None,
               seed: int = 0) -> list[RegressorConfig]:
    """All menu combinations; the default attribute menu is every droppable
    input group plus the year plus keeping all inputs."""
    if attr_drops is None:
        groups = attr_drop_groups(tuple(variables)) if variables else attr_drop_groups()
        attr_drops = [None] + sorted(groups)
    grid = []
    for depth in depths:
        for dropout in dropouts:
            for l2 in l2s:
                for dropped in attr_drops:
                    grid.append(RegressorConfig.from_depth(
                        depth, dropout=dropout, l2=l2,
                        dropped_attribute=dropped, seed=seed))
    if not grid:
        raise ConfigError("empty sweep grid")
    return grid


def load_grid_json(path: str | Path, variables: Sequence[str] | None = None,
                   seed: int = 0) -> list[RegressorConfig]:
    """Grid menus from a JSON file: {"depths": [...], "dropouts": [...],
    "l2s": [...], "attr_drops": [... or null]}."""
    with open(path) as fh:
        spec = json.load(fh)
    attr_drops = spec.get("attr_drops")
    if attr_drops is not None:
        attr_drops = [None if a in (None, "none") else a for a in attr_drops]
    return build_grid(
        depths=spec.get("depths", tuple(range(1, 7))),
        dropouts=spec.get("dropouts", DROPOUT_MENU),
        l2s=spec.get("l2s", L2_MENU),
        attr_drops=attr_drops,
        variables=variables,
        seed=seed,
    )


@dataclass
class SweepEntry:
    config: RegressorConfig
    mae_mean_val: float
    mae_std_val: float
    n_parameters: int
    status: str = "ok"
    rank: int = 0

    def sort_key(self) -> tuple:
        diverged = self.status != "ok"
        return (diverged, self.mae_mean_val, self.mae_std_val, self.n_parameters)


@dataclass
class SweepResult:
    leaderboard: list[SweepEntry]
    winner: RegressorConfig
    winner_model: TrainedRegressor
    split: Split | None = field(repr=False, default=None)


def run_sweep(grid: Sequence[RegressorConfig], table: RegressionTable, spec: SplitSpec,
              epochs: int = DEFAULT_EPOCHS, patience: int = DEFAULT_PATIENCE,
              lr: float = DEFAULT_LR, batch_size: int = DEFAULT_BATCH_SIZE,
              workers: int = 1) -> SweepResult:
    """Train every candidate and rank by validation mean-prediction MAE.

    Ties break on std-prediction MAE, then on parameter count. Diverging
    candidates are recorded with infinite error rather than aborting the
    sweep. Candidate order does not affect the leaderboard.
    """
    if not grid:
        raise ConfigError("sweep grid is empty")
    split = make_split(spec, table)
    if len(split.val_idx) == 0:
        raise SplitError("sweep requires a split kind with a validation set")
    X_tr, Y_tr = table.X[split.train_idx], table.Y[split.train_idx]
    X_va, Y_va = table.X[split.val_idx], table.Y[split.val_idx]

    def run_one(config: RegressorConfig) -> tuple[SweepEntry, TrainedRegressor | None]:
        try:
            model = train(config, table.schema, X_tr, Y_tr, X_va, Y_va,
                          epochs=epochs, patience=patience, lr=lr, batch_size=batch_size)
        except Exception as exc:  # divergence is recorded, not fatal
            entry = SweepEntry(config=config, mae_mean_val=float("inf"),
                               mae_std_val=float("inf"), n_parameters=0,
                               status=f"diverged: {exc}")
            return entry, None
        metrics = model.metrics["validation"]
        entry = SweepEntry(config=config, mae_mean_val=metrics["mae_mean"],
                           mae_std_val=metrics["mae_std"],
                           n_parameters=model.params.n_parameters)
        return entry, model

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, grid))
    else:
        results = [run_one(c) for c in grid]

    leaderboard = sorted((entry for entry, _ in results), key=SweepEntry.sort_key)
    for i, entry in enumerate(leaderboard):
        entry.rank = i + 1
    models = {id(entry): model for entry, model in results}
    best_entry = leaderboard[0]
    if best_entry.status != "ok":
        raise ConfigError("every sweep candidate diverged")
    return SweepResult(leaderboard=leaderboard, winner=best_entry.config,
                       winner_model=models[id(best_entry)], split=split)


def retrain_winner(result: SweepResult, table: RegressionTable,
                   lr: float = DEFAULT_LR, batch_size: int = DEFAULT_BATCH_SIZE,
                   ) -> TrainedRegressor:
    """Refit the winning configuration on train+validation rows.

    Runs for the epoch count early stopping chose during the sweep, then
    attaches residuals from the hidden test rows for simulation use.
    """
    split = result.split
    idx = np.sort(np.concatenate([split.train_idx, split.val_idx]))
    epochs = max(result.winner_model.best_epoch, 1)
    model = train(result.winner, table.schema, table.X[idx], table.Y[idx],
                  epochs=epochs, lr=lr, batch_size=batch_size)
    if len(split.test_idx):
        model.metrics["test"] = evaluate(model, table.X[split.test_idx],
                                         table.Y[split.test_idx])
        model.residuals = extract_residuals(model, table.X[split.test_idx],
                                            table.Y[split.test_idx])
    return model
