import math

import numpy as np
import pytest

from dataset import Dataset
from errors import CapacityError, DomainError, RewardError
from evaluation import (
    allocate_provider_rewards,
    allocate_rewards,
    average_curves,
    random_ranking,
    removal_curve,
    removal_order,
    retrain,
    sign_test,
    summarize,
    value_loss,
)
from helper import derive_seed
from model import Architecture, zeros
from shapley import ShapleyVector


def test_uniform_model_loss_is_log_m(tiny_data):
    assert value_loss(tiny_data, zeros(Architecture.logistic(2, 2))) == pytest.approx(0.6931, abs=1e-4)
    assert value_loss(tiny_data, zeros(Architecture.logistic(2, 2))) == pytest.approx(math.log(2), abs=1e-12)


def test_value_loss_needs_points():
    empty = Dataset(np.zeros((0, 2)), np.zeros(0, dtype=int), 2)
    with pytest.raises(DomainError):
        value_loss(empty, zeros(Architecture.logistic(2, 2)))


def test_removal_order_breaks_ties_by_index():
    assert removal_order([0.5, 0.9, 0.5, 0.1]).tolist() == [1, 0, 2, 3]


def test_random_ranking_is_seeded():
    assert np.array_equal(random_ranking(6, 3), random_ranking(6, 3))
    assert not np.array_equal(random_ranking(6, 3), random_ranking(6, 4))


def test_zero_removal_is_plain_retrain(blobs, fast_cfg):
    curve = removal_curve(blobs, np.arange(blobs.n), [0.0], fast_cfg, blobs, seed=5, method="exact")
    model = retrain(blobs, fast_cfg, None, derive_seed(5, "eta", 0.0))
    assert curve.h_values[0] == value_loss(blobs, model)


def test_removal_curve_frame(blobs, fast_cfg):
    curve = removal_curve(blobs, random_ranking(blobs.n, 0), [0.0, 0.25, 0.5], fast_cfg, blobs,
                          seed=2, method="random")
    frame = curve.to_frame()
    assert list(frame.columns) == ["eta", "h_value", "method", "seed"]
    assert frame["eta"].tolist() == [0.0, 0.25, 0.5]
    assert set(frame["method"]) == {"random"}
    again = removal_curve(blobs, random_ranking(blobs.n, 0), [0.0, 0.25, 0.5], fast_cfg, blobs,
                          seed=2, method="random", threads=2)
    assert np.array_equal(curve.h_values, again.h_values)


def test_removal_keeps_enough_points(tiny_data, fast_cfg):
    with pytest.raises(CapacityError):
        removal_curve(tiny_data, np.arange(4), [0.0, 0.6], fast_cfg, tiny_data)


@pytest.mark.parametrize("etas", [[], [0.2, 0.1], [0.0, 1.0], [-0.1]])
def test_removal_fraction_checks(tiny_data, fast_cfg, etas):
    with pytest.raises(DomainError):
        removal_curve(tiny_data, np.arange(4), etas, fast_cfg, tiny_data)


def test_rankings_must_cover_data(tiny_data, fast_cfg):
    with pytest.raises(DomainError):
        removal_curve(tiny_data, np.arange(3), [0.0], fast_cfg, tiny_data)


def test_average_curves(blobs, fast_cfg):
    first = removal_curve(blobs, np.arange(8), [0.0, 0.25], fast_cfg, blobs, seed=1)
    second = removal_curve(blobs, -np.arange(8), [0.0, 0.25], fast_cfg, blobs, seed=1)
    mean = average_curves([first, second])
    assert np.allclose(mean.h_values, (first.h_values + second.h_values) / 2)


def test_rewards_follow_attributions():
    split = allocate_rewards([0.1, 0.3], 100.0)
    assert split.per_provider == pytest.approx([25.0, 75.0])
    assert not split.clamped
    vector = ShapleyVector.certify(np.array([0.1, 0.3]), 0.4, 0.0)
    assert allocate_rewards(vector, 100.0).per_provider == pytest.approx([25.0, 75.0])


def test_rewards_are_scale_invariant():
    phi = np.array([0.2, 0.5, 0.3])
    assert np.allclose(allocate_rewards(phi, 10.0).per_provider, allocate_rewards(7 * phi, 10.0).per_provider)


def test_negative_attributions_are_clamped():
    split = allocate_rewards([-0.1, 0.3], 100.0)
    assert split.per_provider == pytest.approx([0.0, 100.0])
    assert split.clamped


@pytest.mark.parametrize("phi,c", [([0.0, 0.0], 100.0), ([0.1, -0.1], 1.0), ([0.1, 0.3], -1.0), ([-0.3, -0.1], 1.0)])
def test_reward_errors(phi, c):
    with pytest.raises(RewardError):
        allocate_rewards(phi, c)


def test_provider_rewards_sum_shared_points():
    rewards = allocate_provider_rewards([0.1, 0.2, 0.1], 8.0, ["a", "b", "a"])
    assert rewards == pytest.approx({"a": 4.0, "b": 4.0})
    with pytest.raises(RewardError):
        allocate_provider_rewards([0.1, 0.2], 1.0, ["a"])


def test_summarize():
    summary = summarize([1.0, 2.0, 3.0])
    assert (summary.mean, summary.std, summary.count) == (2.0, 1.0, 3)
    assert summarize([4.0]).std == 0.0


def test_sign_test():
    assert sign_test(np.ones(10), np.zeros(10)) == pytest.approx(0.5 ** 10)
    assert sign_test(np.zeros(4), np.zeros(4)) == 1.0
    assert sign_test(np.zeros(10), np.ones(10)) == pytest.approx(1.0)
