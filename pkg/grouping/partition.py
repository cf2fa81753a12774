import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from dataset import Dataset
from errors import PartitionError
from model import ModelParams, predict_logits

logger = logging.getLogger(__name__)

PARTITION_METHODS = ("by-label", "kmeans-logits")
KMEANS_MAX_ITER = 100


@dataclass(frozen=True, eq=False)
class GroupPartition:
    """N disjoint, nonempty groups covering the indices 0..n-1."""

    groups: tuple
    method: str = "explicit"
    group_of: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        groups = tuple(tuple(sorted(int(i) for i in group)) for group in self.groups)
        if not groups or any(len(group) == 0 for group in groups):
            raise PartitionError("every group must be nonempty")
        members = np.concatenate([np.asarray(group) for group in groups])
        n = members.size
        if not np.array_equal(np.sort(members), np.arange(n)):
            raise PartitionError("groups must be disjoint and cover every index exactly once")
        group_of = np.empty(n, dtype=np.int64)
        for g, group in enumerate(groups):
            group_of[list(group)] = g
        group_of.setflags(write=False)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "group_of", group_of)

    @property
    def N(self) -> int:
        return len(self.groups)

    @property
    def n(self) -> int:
        return self.group_of.size

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(group) for group in self.groups])

    def __eq__(self, other):
        return isinstance(other, GroupPartition) and self.groups == other.groups

    def __hash__(self):
        return hash(self.groups)

    def to_json(self) -> dict:
        return {"N": self.N, "groups": [list(group) for group in self.groups], "method": self.method}

    @classmethod
    def from_json(cls, payload: dict) -> "GroupPartition":
        partition = cls(tuple(tuple(group) for group in payload["groups"]), payload.get("method", "explicit"))
        if partition.N != payload.get("N", partition.N):
            raise PartitionError(f"N={payload['N']} but {partition.N} groups listed")
        return partition


def equal_partition(n: int, N: int) -> GroupPartition:
    """Contiguous groups whose sizes differ by at most one."""
    if not 1 <= N <= n:
        raise PartitionError(f"need 1 <= N <= n, got N={N}, n={n}")
    return GroupPartition(tuple(tuple(chunk) for chunk in np.array_split(np.arange(n), N)), "equal")


def _by_label(data: Dataset, N: int) -> list[np.ndarray]:
    if N != data.m:
        raise PartitionError(f"by-label grouping needs N = m = {data.m}, got N={N}")
    groups = [np.flatnonzero(data.labels == label) for label in range(data.m)]
    empty = [label for label, group in enumerate(groups) if group.size == 0]
    if empty:
        raise PartitionError(f"no training points carry labels {empty}")
    return groups


def _kmeans_logits(data: Dataset, model: ModelParams, N: int, seed: int) -> list[np.ndarray]:
    logits = predict_logits(model, data.features)
    kmeans = KMeans(n_clusters=N, init="k-means++", n_init=1, max_iter=KMEANS_MAX_ITER, random_state=seed % 2**32)
    with warnings.catch_warnings():
        # duplicate logit vectors leave fewer distinct points than clusters
        warnings.simplefilter("ignore", ConvergenceWarning)
        assignment = kmeans.fit_predict(logits)
    groups = [np.flatnonzero(assignment == cluster) for cluster in range(N)]
    for cluster in range(N):
        if groups[cluster].size == 0:
            largest = int(np.argmax([group.size for group in groups]))
            groups[cluster], groups[largest] = groups[largest][-1:], groups[largest][:-1]
            logger.debug("repaired empty cluster %d from cluster %d", cluster, largest)
    return sorted(groups, key=lambda group: int(group.min()))


def psi_partition(data: Dataset, model: ModelParams, N: int, method: str = None, seed: int = 0) -> GroupPartition:
    """Grouping function: by true label, or k-means over the service model's logits f_D(x_i)."""
    if not 1 <= N <= data.n:
        raise PartitionError(f"need 1 <= N <= n = {data.n}, got N={N}")
    if method is None:
        method = "by-label" if N == data.m else "kmeans-logits"
    if method == "by-label":
        groups = _by_label(data, N)
    elif method == "kmeans-logits":
        groups = _kmeans_logits(data, model, N, seed)
    else:
        raise PartitionError(f"unknown grouping method {method!r}, expected one of {PARTITION_METHODS}")
    partition = GroupPartition(tuple(tuple(group.tolist()) for group in groups), method)
    logger.info("partitioned %d points into %d groups (%s), sizes %s", data.n, N, method, partition.sizes.tolist())
    return partition


@dataclass(frozen=True)
class CoalitionSizeReport:
    sizes: tuple
    largest: int
    best_group_count: int


def optimal_group_count(n: int) -> int:
    """N minimizing ceil(n / N) + N - 1 over equal partitions; ties go to the smaller N."""
    candidates = np.arange(1, n + 1)
    cost = -(-n // candidates) + candidates - 1
    return int(candidates[np.argmin(cost)])


def coalition_size(n: int, partition: GroupPartition) -> CoalitionSizeReport:
    """Number of players |D_j| + N - 1 in the reduced game of each group."""
    if partition.n != n:
        raise PartitionError(f"partition covers {partition.n} points, expected {n}")
    sizes = tuple(int(size) + partition.N - 1 for size in partition.sizes)
    return CoalitionSizeReport(sizes, max(sizes), optimal_group_count(n))
