import numpy as np
import pytest

from dataset import Dataset, SyntheticSpec, generate
from model import TrainConfig


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def blobs():
    """Eight separable 2-D points, two classes."""
    return generate(SyntheticSpec("gaussian-blobs", n=8, d=2, m=2, noise_std=0.3, seed=1))


@pytest.fixture
def tiny_data():
    features = np.array([[0.0, 1.0], [1.0, 0.0], [-1.0, 0.5], [0.5, -1.0]])
    return Dataset(features, np.array([0, 1, 0, 1]), 2)


@pytest.fixture
def fast_cfg():
    """Short full-batch training that always reaches its epoch cap."""
    return TrainConfig(learning_rate=0.5, epochs=20, batch_size=64, seed=3, convergence_tol=0.0)


@pytest.fixture
def write_config(tmp_path):
    """Writes a flat key = value experiment file and returns its path."""

    def write(name="experiment", **entries):
        path = tmp_path / f"{name}.cfg"
        lines = [f"{key.replace('__', '.')} = {value}" for key, value in entries.items()]
        path.write_text("\n".join(lines) + "\n")
        return path

    return write
