import logging

import numpy as np
from sklearn.datasets import make_moons

from dataset.types import Dataset, SyntheticSpec
from helper import make_rng

logger = logging.getLogger(__name__)

BLOB_RADIUS = 3.0

# (+,+) (-,+) (-,-) (+,-); label is the parity of the quadrant index.
XOR_CORNERS = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def blob_centers(m: int, d: int) -> np.ndarray:
    """Class centers evenly spaced on a circle in the first two coordinates."""
    centers = np.zeros((m, d))
    if d == 1:
        centers[:, 0] = BLOB_RADIUS * (np.arange(m) - (m - 1) / 2)
        return centers
    angles = 2 * np.pi * np.arange(m) / m
    centers[:, 0] = BLOB_RADIUS * np.cos(angles)
    centers[:, 1] = BLOB_RADIUS * np.sin(angles)
    return centers


def _gaussian_blobs(spec: SyntheticSpec, rng: np.random.Generator):
    centers = blob_centers(spec.m, spec.d) if spec.centers is None else np.asarray(spec.centers, dtype=np.float64)
    labels = rng.permutation(np.arange(spec.n) % spec.m)
    features = centers[labels] + spec.noise_std * rng.standard_normal((spec.n, spec.d))
    return features, labels


def _xor(spec: SyntheticSpec, rng: np.random.Generator):
    corners = rng.permutation(np.arange(spec.n) % 4)
    features = np.zeros((spec.n, spec.d))
    features[:, :2] = XOR_CORNERS[corners]
    if spec.noise_std > 0:
        features += spec.noise_std * rng.standard_normal((spec.n, spec.d))
    return features, corners % 2


def _two_moons(spec: SyntheticSpec, rng: np.random.Generator):
    moons, labels = make_moons(
        n_samples=spec.n,
        noise=spec.noise_std or None,
        random_state=int(rng.integers(2**31 - 1)),
    )
    features = np.zeros((spec.n, spec.d))
    features[:, :2] = moons
    return features, labels


GENERATORS = {
    "gaussian-blobs": _gaussian_blobs,
    "xor": _xor,
    "two-moons": _two_moons,
}


def generate(spec: SyntheticSpec) -> Dataset:
    """Deterministic synthetic dataset; class counts are balanced within one."""
    rng = make_rng(spec.seed)
    features, labels = GENERATORS[spec.kind](spec, rng)
    logger.debug("generated %s dataset n=%d d=%d m=%d", spec.kind, spec.n, spec.d, spec.m)
    return Dataset(features, labels.astype(np.int64), spec.m)
