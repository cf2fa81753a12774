from dataclasses import dataclass, field

import numpy as np

from errors import DatasetError
from helper import array_digest, make_rng

SYNTHETIC_KINDS = ("gaussian-blobs", "xor", "two-moons")


@dataclass(frozen=True, eq=False)
class Dataset:
    """n labeled feature vectors; each row is one player of the valuation game."""

    features: np.ndarray
    labels: np.ndarray
    m: int
    provider_ids: np.ndarray = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features[:, None]
        labels = np.asarray(self.labels)
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            raise DatasetError("labels must be integers")
        labels = labels.astype(np.int64)
        if features.ndim != 2:
            raise DatasetError(f"features must be an n x d matrix, got shape {features.shape}")
        if features.shape[0] != labels.shape[0]:
            raise DatasetError(f"{features.shape[0]} feature rows but {labels.shape[0]} labels")
        if self.m < 1:
            raise DatasetError(f"class count must be positive, got {self.m}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.m):
            raise DatasetError(f"labels must lie in [0, {self.m})")
        provider_ids = self.provider_ids
        if provider_ids is None:
            provider_ids = np.arange(labels.shape[0])
        provider_ids = np.asarray(provider_ids, dtype=np.int64)
        if provider_ids.shape != labels.shape:
            raise DatasetError("providerIds must have one entry per point")

        for array in (features, labels, provider_ids):
            array.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "provider_ids", provider_ids)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def __len__(self):
        return self.n

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices)
        if indices.dtype == bool:
            indices = np.flatnonzero(indices)
        return Dataset(self.features[indices], self.labels[indices], self.m, self.provider_ids[indices])

    def split(self, test_size: int, seed: int) -> tuple["Dataset", "Dataset"]:
        """Deterministic held-out split; returns (train, held_out)."""
        if not 0 <= test_size < self.n:
            raise DatasetError(f"test_size must be in [0, {self.n}), got {test_size}")
        order = make_rng(seed).permutation(self.n)
        held_out, train = np.sort(order[:test_size]), np.sort(order[test_size:])
        return self.subset(train), self.subset(held_out)

    def one_hot(self) -> np.ndarray:
        return np.eye(self.m)[self.labels]

    def fingerprint(self) -> str:
        return array_digest(self.features, self.labels, self.provider_ids, np.array([self.m]))


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str
    n: int
    d: int = 2
    m: int = 2
    noise_std: float = 0.5
    seed: int = 0
    centers: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in SYNTHETIC_KINDS:
            raise DatasetError(f"unknown synthetic kind {self.kind!r}, expected one of {SYNTHETIC_KINDS}")
        if self.n < 1:
            raise DatasetError("n must be at least 1")
        if self.d < 1 or self.m < 1:
            raise DatasetError("d and m must be positive")
        if self.noise_std < 0:
            raise DatasetError("noiseStd must be non-negative")
        if self.kind in ("xor", "two-moons"):
            if self.m != 2:
                raise DatasetError(f"{self.kind} forces m=2, got m={self.m}")
            if self.d < 2:
                raise DatasetError(f"{self.kind} needs d >= 2, got d={self.d}")
        if self.centers is not None:
            centers = np.asarray(self.centers, dtype=np.float64)
            if centers.shape != (self.m, self.d):
                raise DatasetError(f"gaussian-blobs needs {self.m} centers of dimension {self.d}")
