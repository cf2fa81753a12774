"""
Data-removal curves: drop the highest-ranked training points, retrain the
service model from scratch and record the value loss on a test set.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from dataset import Dataset
from errors import CapacityError, DomainError
from evaluation.metrics import value_loss
from helper import derive_seed, make_rng
from model import Architecture, ModelParams, TrainConfig, init, train

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["eta", "h_value", "method", "seed"]


@dataclass(frozen=True, eq=False)
class RemovalCurve:
    etas: np.ndarray
    h_values: np.ndarray
    method: str = ""
    seed: int = 0

    def __post_init__(self):
        if len(self.etas) != len(self.h_values):
            raise DomainError(f"{len(self.etas)} etas but {len(self.h_values)} values")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "eta": self.etas,
            "h_value": self.h_values,
            "method": self.method,
            "seed": self.seed,
        }, columns=CSV_COLUMNS)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)


def check_etas(etas) -> np.ndarray:
    etas = np.asarray(etas, dtype=np.float64)
    if etas.size == 0 or etas.min() < 0 or etas.max() >= 1:
        raise DomainError("removal fractions must lie in [0, 1)")
    if np.any(np.diff(etas) <= 0):
        raise DomainError("removal fractions must be strictly increasing")
    return etas


def removal_order(rankings) -> np.ndarray:
    """Indices from highest to lowest ranking; ties go to the lower index first."""
    rankings = np.asarray(rankings, dtype=np.float64)
    return np.lexsort((np.arange(rankings.size), -rankings))


def random_ranking(n: int, seed: int) -> np.ndarray:
    return make_rng(derive_seed(seed, "random-ranking")).random(n)


def retrain(data: Dataset, cfg: TrainConfig, arch: Architecture = None, seed: int = 0) -> ModelParams:
    """A fresh service model trained to convergence on data."""
    arch = arch or Architecture.logistic(data.d, data.m)
    return train(init(arch, seed), data, replace(cfg, seed=seed), stop_on_convergence=True).params


def removal_curve(
        data: Dataset,
        rankings,
        etas,
        retrain_cfg: TrainConfig,
        test_set: Dataset,
        *,
        arch: Architecture = None,
        seed: int = 0,
        method: str = "",
        threads: int = 1,
) -> RemovalCurve:
    rankings = np.asarray(rankings, dtype=np.float64)
    if rankings.shape != (data.n,):
        raise DomainError(f"need {data.n} rankings, got shape {rankings.shape}")
    etas = check_etas(etas)
    order = removal_order(rankings)

    counts = [math.ceil(eta * data.n) for eta in etas]
    for eta, k in zip(etas, counts):
        if data.n - k < data.m:
            raise CapacityError(f"removing {k} of {data.n} points at eta={eta} leaves fewer than m={data.m}")

    def point(i: int) -> float:
        keep = np.ones(data.n, dtype=bool)
        keep[order[:counts[i]]] = False
        model = retrain(data.subset(keep), retrain_cfg, arch, derive_seed(seed, "eta", float(etas[i])))
        return value_loss(test_set, model)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            h_values = list(pool.map(point, range(etas.size)))
    else:
        h_values = [point(i) for i in range(etas.size)]
    logger.debug("removal curve %s: %s", method, h_values)
    return RemovalCurve(etas, np.asarray(h_values), method, seed)


def average_curves(curves: list[RemovalCurve]) -> RemovalCurve:
    first = curves[0]
    h_values = np.mean([curve.h_values for curve in curves], axis=0)
    return RemovalCurve(first.etas, h_values, first.method, first.seed)
