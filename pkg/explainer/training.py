"""
Training loops for the amortized explainer.

Every variant minimizes the squared residual v(s) - v(0) - s . phi of the
efficiently normalized prediction over kernel-sampled coalitions s, test
points x from the explainer pool and labels y drawn uniformly. They differ in
the utility (converged or K-epoch sub-models) and in how coalitions are drawn:

  FDS    s over all n players, converged utility
  AFDS   s over all n players, K-epoch utility at lr * beta
  GFDS   per group, s over that group's reduced players, expanded to n
  GFDS+  s over the N groups, expanded to n
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import torch

import config
from dataset import Dataset
from errors import ConfigError, DomainError, PartitionError
from explainer.network import (
    HEAD_N_DIM,
    HEAD_PENALTY,
    HEAD_SPLIT,
    ExplainerParams,
    init_explainer,
    raw_outputs,
)
from grouping import GroupPartition, gfds_players, psi_partition
from helper import derive_seed, make_rng
from model import ModelParams, TrainConfig
from services.cache import cache_wrap
from shapley import kernel_sample_batch
from utility import ConvergedUtility, TruncatedUtility, UtilityProvider

logger = logging.getLogger(__name__)

VARIANTS = ("FDS", "AFDS", "GFDS", "GFDS+")
GFDS_PLUS_HEADS = (HEAD_PENALTY, HEAD_SPLIT)
NORM_EPS = 1e-12


@dataclass(frozen=True)
class ExplainerTrainConfig:
    variant: str = "FDS"
    learning_rate: float = config.EXPLAINER_LR
    steps: int = config.EXPLAINER_STEPS
    batch_size: int = config.EXPLAINER_BATCH_SIZE
    K: int = config.K
    beta: float = config.BETA
    N: int = None
    gamma: float = 0.0
    gfds_plus_head: str = HEAD_SPLIT
    hidden_units: int = config.EXPLAINER_HIDDEN_UNITS
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError("explainer.variant", f"expected one of {VARIANTS}, got {self.variant!r}")
        if self.learning_rate <= 0:
            raise ConfigError("explainer.learning_rate", "must be positive")
        if self.steps < 0:
            raise ConfigError("explainer.steps", "must be non-negative")
        if self.batch_size < 1:
            raise ConfigError("explainer.batch_size", "must be at least 1")
        if self.K < 1:
            raise ConfigError("explainer.K", "must be at least 1")
        if self.beta <= 0:
            raise ConfigError("explainer.beta", "must be positive")
        if self.gamma < 0:
            raise ConfigError("explainer.gamma", "must be non-negative")
        if self.gfds_plus_head not in GFDS_PLUS_HEADS:
            raise ConfigError("explainer.gfds_plus_head", f"expected one of {GFDS_PLUS_HEADS}")
        if self.N is not None and self.N < 1:
            raise ConfigError("explainer.N", "must be at least 1")
        if self.hidden_units < 1:
            raise ConfigError("explainer.hidden_units", "must be at least 1")


@dataclass(frozen=True)
class PartitionConfig:
    N: int
    method: str = None
    seed: int = 0


def normalize_batch(pred: torch.Tensor, v_zero: torch.Tensor, v_one: torch.Tensor) -> torch.Tensor:
    """Additive efficient normalization of every row of a batch."""
    shift = (v_one - v_zero - pred.sum(dim=1)) / pred.shape[1]
    return pred + shift[:, None]


def explainer_loss(pred, masks, v_s, v_zero, v_one) -> torch.Tensor:
    """Mean of (v(s) - v(0) - s . phi)^2 with phi the normalized prediction."""
    v_s, v_zero, v_one = (torch.as_tensor(a, dtype=pred.dtype) for a in (v_s, v_zero, v_one))
    masks = torch.as_tensor(np.asarray(masks), dtype=pred.dtype)
    normalized = normalize_batch(pred, v_zero, v_one)
    residual = v_s - v_zero - (masks * normalized).sum(dim=1)
    return residual.pow(2).mean()


def group_spread_penalty(normalized: torch.Tensor, partition: GroupPartition) -> torch.Tensor:
    """Batch mean of sum over groups of the smoothed L2 distance to the group mean."""
    total = normalized.new_zeros(normalized.shape[0])
    for group in partition.groups:
        members = normalized[:, list(group)]
        deviation = members - members.mean(dim=1, keepdim=True)
        total = total + torch.sqrt(deviation.pow(2).sum(dim=1) + NORM_EPS)
    return total.mean()


def block_matrix(players: list[tuple], n: int) -> np.ndarray:
    """players x n indicator: row p marks the data points reduced player p stands for."""
    blocks = np.zeros((len(players), n), dtype=np.int64)
    for p, members in enumerate(players):
        blocks[p, list(members)] = 1
    return blocks


def expand_masks(reduced: np.ndarray, blocks: np.ndarray) -> np.ndarray:
    return (reduced.astype(np.int64) @ blocks) > 0


def evaluate_batch(provider: UtilityProvider, X: np.ndarray, ys: np.ndarray, masks: np.ndarray):
    """(v(s), v(0), v(1)) for every row of a batch."""

    def row(i):
        x, y = X[i], int(ys[i])
        return provider.eval(masks[i], x, y), provider.v_zero(x, y), provider.v_one(x, y)

    if provider.threads > 1:
        with ThreadPoolExecutor(max_workers=provider.threads) as pool:
            rows = list(pool.map(row, range(len(ys))))
    else:
        rows = [row(i) for i in range(len(ys))]
    return tuple(np.array(column, dtype=np.float64) for column in zip(*rows))


class _Loop:
    """Shared optimizer, random streams and loss trace of one training run."""

    def __init__(self, params: ExplainerParams, cfg: ExplainerTrainConfig, pool: np.ndarray):
        self.params = params
        self.cfg = cfg
        self.pool = pool
        self.rng = make_rng(derive_seed(cfg.seed, "explainer-draws"))
        self.optimizer = torch.optim.Adam(params.net.parameters(), lr=cfg.learning_rate)
        self.losses = []

    def draw_points(self):
        idx = self.rng.integers(len(self.pool), size=self.cfg.batch_size)
        ys = self.rng.integers(self.params.m, size=self.cfg.batch_size)
        return self.pool[idx], ys

    def update(self, loss: torch.Tensor):
        self.optimizer.zero_grad()
        loss.backward()
        self.optimizer.step()
        self.losses.append(float(loss.detach()))
        step = len(self.losses)
        if step % 500 == 0:
            logger.info("%s step %d/%d loss %.6g", self.cfg.variant, step, self.cfg.steps, self.losses[-1])

    def finish(self, **metadata) -> ExplainerParams:
        self.params.losses = np.asarray(self.losses)
        self.params.metadata = {**asdict(self.cfg), **metadata, "updates": len(self.losses)}
        return self.params


def _pool(data: Dataset, pool) -> np.ndarray:
    if pool is None:
        return data.features
    features = pool.features if isinstance(pool, Dataset) else np.atleast_2d(np.asarray(pool, dtype=np.float64))
    if features.shape[0] == 0 or features.shape[1] != data.d:
        raise DomainError(f"explainer pool must be a nonempty k x {data.d} array")
    return features


def _init(data: Dataset, cfg: ExplainerTrainConfig, head=HEAD_N_DIM, partition=None) -> ExplainerParams:
    return init_explainer(
        data.n, data.d, data.m, cfg.hidden_units, derive_seed(cfg.seed, "explainer-init"),
        head=head, partition=partition,
    )


def _train_full_masks(data, provider, cfg, pool, provider_name) -> ExplainerParams:
    loop = _Loop(_init(data, cfg), cfg, _pool(data, pool))
    if data.n < 2:
        logger.info("single training point; the normalized output is v(1) - v(0) without training")
        return loop.finish(provider=provider_name)
    for _ in range(cfg.steps):
        X, ys = loop.draw_points()
        masks = kernel_sample_batch(data.n, loop.rng, cfg.batch_size)
        v_s, v_zero, v_one = evaluate_batch(provider, X, ys, masks)
        loop.update(explainer_loss(raw_outputs(loop.params, X, ys), masks, v_s, v_zero, v_one))
    return loop.finish(provider=provider_name)


def train_fds(data: Dataset, provider: UtilityProvider, cfg: ExplainerTrainConfig, pool=None) -> ExplainerParams:
    """Fast-DataShapley: the explainer learns the converged-utility game directly."""
    if provider.n != data.n:
        raise DomainError(f"provider has {provider.n} players, data has {data.n} points")
    return _train_full_masks(data, provider, cfg, pool, type(provider).__name__)


def truncated_provider(data: Dataset, service_cfg: TrainConfig, cfg: ExplainerTrainConfig, threads=1, arch=None):
    return cache_wrap(TruncatedUtility(data, service_cfg or TrainConfig(), cfg.K, cfg.beta, arch, threads=threads))


def converged_provider(data: Dataset, service_cfg: TrainConfig, threads=1, arch=None):
    return cache_wrap(ConvergedUtility(data, service_cfg or TrainConfig(), arch, threads=threads))


def train_afds(
        data: Dataset,
        service_cfg: TrainConfig,
        cfg: ExplainerTrainConfig,
        *,
        provider: UtilityProvider = None,
        pool=None,
) -> ExplainerParams:
    """Approximate Fast-DataShapley: same loop over sub-models trained for K epochs at beta * lr."""
    provider = provider or truncated_provider(data, service_cfg, cfg)
    return _train_full_masks(data, provider, cfg, pool, f"truncated(K={cfg.K}, beta={cfg.beta})")


def resolve_partition(data: Dataset, service_model: ModelParams, partition_cfg, cfg: ExplainerTrainConfig):
    if isinstance(partition_cfg, GroupPartition):
        partition = partition_cfg
    else:
        if partition_cfg is None:
            if cfg.N is None:
                raise ConfigError("explainer.N", f"{cfg.variant} needs a group count")
            partition_cfg = PartitionConfig(cfg.N, seed=derive_seed(cfg.seed, "partition"))
        if partition_cfg.N > data.n:
            raise ConfigError("explainer.N", f"N={partition_cfg.N} exceeds n={data.n}")
        partition = psi_partition(data, service_model, partition_cfg.N, partition_cfg.method, partition_cfg.seed)
    if partition.n != data.n:
        raise PartitionError(f"partition covers {partition.n} points, data has {data.n}")
    return partition


def train_gfds(
        data: Dataset,
        service_model: ModelParams,
        partition_cfg,
        cfg: ExplainerTrainConfig,
        *,
        service_cfg: TrainConfig = None,
        provider: UtilityProvider = None,
        pool=None,
) -> ExplainerParams:
    """
    Grouping Fast-DataShapley.

    Each outer iteration draws one batch of (x, y) and then, group by group,
    samples coalitions over that group's reduced players (its own members
    individually, every other group atomically), expands them to length-n
    masks and takes one optimizer step. The N-dim prediction is normalized
    over all n points before the residual is formed.
    """
    partition = resolve_partition(data, service_model, partition_cfg, cfg)
    provider = provider or truncated_provider(data, service_cfg, cfg)
    loop = _Loop(_init(data, cfg), cfg, _pool(data, pool))

    reduced = []
    for group in partition.groups:
        players = gfds_players(group[0], partition)
        if len(players) >= 2:
            reduced.append((len(players), block_matrix(players, data.n)))

    iterations = math.ceil(cfg.steps / partition.N) if reduced else 0
    for _ in range(iterations):
        X, ys = loop.draw_points()
        for size, blocks in reduced:
            masks = expand_masks(kernel_sample_batch(size, loop.rng, cfg.batch_size), blocks)
            v_s, v_zero, v_one = evaluate_batch(provider, X, ys, masks)
            loop.update(explainer_loss(raw_outputs(loop.params, X, ys), masks, v_s, v_zero, v_one))

    loop.params.partition = partition
    return loop.finish(partition_N=partition.N, partition_method=partition.method)


def train_gfds_plus(
        data: Dataset,
        service_model: ModelParams,
        partition_cfg,
        cfg: ExplainerTrainConfig,
        *,
        service_cfg: TrainConfig = None,
        provider: UtilityProvider = None,
        pool=None,
) -> ExplainerParams:
    """
    Grouping Fast-DataShapley Plus.

    Coalitions are drawn over the N groups. With the N-dim-split head the
    network predicts group values directly and each is divided evenly among
    its members at inference. With the n-dim-penalty head it predicts per-datum
    values and gamma weights the spread of normalized values inside each group.
    """
    partition = resolve_partition(data, service_model, partition_cfg, cfg)
    provider = provider or truncated_provider(data, service_cfg, cfg)
    split = cfg.gfds_plus_head == HEAD_SPLIT
    head = HEAD_SPLIT if split else HEAD_PENALTY
    loop = _Loop(_init(data, cfg, head, partition), cfg, _pool(data, pool))
    blocks = block_matrix(list(partition.groups), data.n)

    steps = cfg.steps if partition.N >= 2 else 0
    for _ in range(steps):
        X, ys = loop.draw_points()
        group_masks = kernel_sample_batch(partition.N, loop.rng, cfg.batch_size)
        masks = expand_masks(group_masks, blocks)
        v_s, v_zero, v_one = evaluate_batch(provider, X, ys, masks)
        pred = raw_outputs(loop.params, X, ys)
        if split:
            loss = explainer_loss(pred, group_masks, v_s, v_zero, v_one)
        else:
            loss = explainer_loss(pred, masks, v_s, v_zero, v_one)
            if cfg.gamma > 0:
                normalized = normalize_batch(pred, torch.as_tensor(v_zero), torch.as_tensor(v_one))
                loss = loss + cfg.gamma * group_spread_penalty(normalized, partition)
        loop.update(loss)

    return loop.finish(partition_N=partition.N, partition_method=partition.method)


def train_explainer(
        data: Dataset,
        cfg: ExplainerTrainConfig,
        *,
        service_model: ModelParams = None,
        service_cfg: TrainConfig = None,
        partition=None,
        provider: UtilityProvider = None,
        pool=None,
        threads: int = 1,
        arch=None,
) -> tuple[ExplainerParams, UtilityProvider]:
    """Dispatches on cfg.variant; returns the explainer and the provider whose v(1), v(0) normalize it."""
    if cfg.variant == "FDS":
        provider = provider or converged_provider(data, service_cfg, threads, arch)
        return train_fds(data, provider, cfg, pool), provider
    provider = provider or truncated_provider(data, service_cfg, cfg, threads, arch)
    if cfg.variant == "AFDS":
        return train_afds(data, service_cfg, cfg, provider=provider, pool=pool), provider
    trainer = train_gfds if cfg.variant == "GFDS" else train_gfds_plus
    return trainer(data, service_model, partition, cfg, provider=provider, pool=pool), provider
