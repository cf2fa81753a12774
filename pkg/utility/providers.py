"""
Value functions backed by retrained sub-service models.

The utility of a coalition s for a test point (x, y) is the probability that
the model trained on D_s assigns to label y at x. Training a sub-model does not
depend on (x, y), so every provider keeps a bounded cache of trained sub-models
keyed by mask; the value cache from services.cache sits on top of that.
"""

import abc
import logging
import threading
from dataclasses import replace

from cachetools import LRUCache

from config import MODEL_CACHE_SIZE
from dataset import Dataset
from errors import DomainError
from helper import derive_seed
from model import Architecture, ModelParams, TrainConfig, init, predict_proba, train, zeros
from utility.games import UtilityProvider
from utility.masks import SubsetMask, as_mask

logger = logging.getLogger(__name__)


class SubModelUtility(UtilityProvider):

    def __init__(
            self,
            data: Dataset,
            cfg: TrainConfig,
            arch: Architecture = None,
            *,
            zero_init: bool = False,
            threads: int = 1,
            cache_size: int = MODEL_CACHE_SIZE,
    ):
        super().__init__(data.n, threads)
        self.data = data
        self.cfg = cfg
        self.arch = arch or Architecture.logistic(data.d, data.m)
        self.zero_init = zero_init
        self.trainings = 0
        self._models = LRUCache(maxsize=cache_size)
        self._lock = threading.Lock()

    @property
    def m(self) -> int:
        return self.data.m

    def empty_value(self) -> float:
        # f trained on no data is the uniform predictor.
        return 1.0 / self.data.m

    def initial_params(self, mask: SubsetMask) -> ModelParams:
        seed = derive_seed(self.cfg.seed, "submodel", mask.key())
        return zeros(self.arch, seed) if self.zero_init else init(self.arch, seed)

    @abc.abstractmethod
    def fit(self, mask: SubsetMask) -> ModelParams:
        """Trains the sub-service model on D_s."""

    def submodel(self, mask) -> ModelParams:
        mask = as_mask(mask, self.n)
        key = mask.key()
        with self._lock:
            params = self._models.get(key)
        if params is None:
            params = self.fit(mask)
            with self._lock:
                self._models[key] = params
                self.trainings += 1
        return params

    def eval(self, mask, x, y) -> float:
        mask = as_mask(mask, self.n)
        if not 0 <= y < self.data.m:
            raise DomainError(f"label {y} out of range [0, {self.data.m})")
        if mask.popcount == 0:
            return self.empty_value()
        return float(predict_proba(self.submodel(mask), x)[y])


class ConvergedUtility(SubModelUtility):
    """v_{x,y}(s): sub-model trained until the loss stops improving (or the epoch cap)."""

    def fit(self, mask: SubsetMask) -> ModelParams:
        result = train(self.initial_params(mask), self.data.subset(mask.bits), self.cfg, stop_on_convergence=True)
        logger.debug("trained sub-model on %d points for %d epochs", mask.popcount, result.epochs_run)
        return result.params


class TruncatedUtility(SubModelUtility):
    """v_{x,y,K}(s): sub-model after exactly K epochs at learning rate beta * lr."""

    def __init__(self, data: Dataset, cfg: TrainConfig, K: int, beta: float = 1.0, arch: Architecture = None, **kwargs):
        if K < 1:
            raise DomainError(f"K must be at least 1, got {K}")
        if beta <= 0:
            raise DomainError(f"beta must be positive, got {beta}")
        super().__init__(data, cfg, arch, **kwargs)
        self.K = K
        self.beta = beta
        self.truncated_cfg = replace(cfg, epochs=K, lr_scale=beta)

    def fit(self, mask: SubsetMask) -> ModelParams:
        return train(self.initial_params(mask), self.data.subset(mask.bits), self.truncated_cfg).params


def utility_full(train_data: Dataset, mask, x, y: int, cfg: TrainConfig, arch: Architecture = None) -> float:
    return ConvergedUtility(train_data, cfg, arch).eval(mask, x, y)


def utility_afds(
        train_data: Dataset, mask, x, y: int, cfg: TrainConfig, K: int, beta: float = 1.0, arch: Architecture = None
) -> float:
    return TruncatedUtility(train_data, cfg, K, beta, arch).eval(mask, x, y)
