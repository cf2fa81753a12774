"""Cross-module checks against brute-force oracles and the error bounds they must honour."""

import logging
import time

import numpy as np
import pytest
from scipy.stats import chisquare, spearmanr

from dataset import Dataset, SyntheticSpec, generate
from evaluation import random_ranking, removal_curve, sign_test
from explainer import ExplainerTrainConfig, PartitionConfig, predict_normalized, train_explainer, train_fds
from grouping import GroupPartition, equal_partition, gfds_exact_values, gfds_plus_values, group_shapley_values
from handlers.compare import timing_order_violations
from model import Architecture, TrainConfig
from shapley import cwls_solve, exact_shapley, exact_shapley_by_permutations, kernel_sample_batch, value_table
from utility import ConvergedUtility, TabularGame, TruncatedUtility, additive_game, inter_group_additive_game, random_game

logger = logging.getLogger(__name__)


def _random_groups(n, N, rng):
    return [sorted(chunk.tolist()) for chunk in np.array_split(rng.permutation(n), N)]


@pytest.mark.slow
def test_subset_and_permutation_oracles_agree():
    rng = np.random.default_rng(11)
    for trial in range(100):
        game = random_game(2 + trial % 7, rng)
        assert np.allclose(exact_shapley(game).values, exact_shapley_by_permutations(game).values, atol=1e-9)


def test_cwls_matches_exact():
    rng = np.random.default_rng(12)
    for trial in range(50):
        game = random_game(2 + trial % 7, rng)
        phi = cwls_solve(game, mode="enumerate")
        assert np.allclose(phi.values, exact_shapley(game).values, atol=1e-6)
        assert phi.efficiency_gap <= 1e-12


@pytest.mark.parametrize("eps", [0.01, 0.1])
def test_perturbed_utility_moves_values_by_at_most_twice_the_perturbation(eps):
    rng = np.random.default_rng(13)
    for _ in range(100):
        game = random_game(6, rng)
        perturbed = TabularGame(6, game.table + rng.uniform(-eps, eps, size=game.table.size))
        drift = np.abs(exact_shapley(perturbed).values - exact_shapley(game).values).max()
        assert drift <= 2 * eps


def test_group_values_and_even_split_bound():
    rng = np.random.default_rng(14)
    for trial in range(50):
        N = 2 + trial % 2
        n = int(rng.integers(N, 10))
        groups = _random_groups(n, N, rng)
        game = inter_group_additive_game(groups, rng)
        partition = GroupPartition(tuple(tuple(group) for group in groups))
        phi = exact_shapley(game).values

        group_values = group_shapley_values(game, partition)
        for g, group in enumerate(partition.groups):
            members = list(group)
            assert group_values[g] == pytest.approx(phi[members].sum(), abs=1e-9)
            standalone = game.value(np.isin(np.arange(n), members)) - game.empty()
            others = sum(
                game.value(np.isin(np.arange(n), other)) - game.empty()
                for other in partition.groups if other != group
            )
            assert group_values[g] == pytest.approx(game.grand() - game.empty() - others, abs=1e-9)
            assert group_values[g] == pytest.approx(standalone, abs=1e-9)

        even = gfds_plus_values(game, partition)
        for group in partition.groups:
            members = list(group)
            spread = phi[members].max() - phi[members].min()
            bound = (1 - 1 / len(members)) * spread
            assert np.all(np.abs(even[members] - phi[members]) <= bound + 1e-12)


def test_gfds_degenerate_partitions_are_exact():
    rng = np.random.default_rng(15)
    for trial in range(20):
        n = 2 + trial % 7
        game = random_game(n, rng)
        exact = exact_shapley(game).values
        assert np.allclose(gfds_exact_values(game, equal_partition(n, 1)), exact, atol=1e-9)
        assert np.allclose(gfds_exact_values(game, equal_partition(n, n)), exact, atol=1e-9)


@pytest.mark.slow
def test_kernel_subset_frequencies():
    rng = np.random.default_rng(16)
    draws, chunk = 4_000_000, 500_000
    counts = np.zeros(16, dtype=np.int64)
    for _ in range(draws // chunk):
        masks = kernel_sample_batch(4, rng, chunk)
        counts += np.bincount(masks.astype(np.int64) @ (1 << np.arange(4)), minlength=16)

    assert counts[0] == counts[15] == 0
    sizes = np.array([bin(s).count("1") for s in range(1, 15)])
    observed = counts[1:15]
    expected = np.where(sizes == 2, 1 / 22, 1 / 11) * draws
    for s in np.flatnonzero(sizes == 2):
        assert abs(observed[s] / draws - 1 / 22) <= 0.01 / 22
    assert chisquare(observed, expected).pvalue > 0.01


@pytest.mark.slow
def test_fds_explainer_ranks_like_exact_values():
    rng = np.random.default_rng(17)
    features = rng.normal(size=(6, 2))
    data = Dataset(features, np.arange(6) % 2, 2)
    game = additive_game([0.05, 0.3, 0.1, 0.25, 0.15, 0.2]) + TabularGame(6, 0.05 * rng.uniform(size=64))
    exact = exact_shapley(game).values

    rhos = []
    for seed in range(5):
        cfg = ExplainerTrainConfig(steps=5000, batch_size=32, learning_rate=1e-3, hidden_units=32, seed=seed)
        params = train_fds(data, game, cfg)
        for x in features:
            phi = predict_normalized(params, x, 0, game.grand(), game.empty())
            assert phi.efficiency_gap <= 1e-12
            rhos.append(spearmanr(phi.values, exact).statistic)
    assert np.mean(rhos) >= 0.9


@pytest.mark.slow
def test_truncated_utility_gap_bounds_value_gap():
    blobs = generate(SyntheticSpec("gaussian-blobs", n=16 + 20, d=2, m=2, noise_std=0.4, seed=18))
    train, held_out = blobs.split(20, seed=0)
    cfg = TrainConfig(learning_rate=0.1, epochs=300, seed=2)
    full = ConvergedUtility(train, cfg)
    truncated = TruncatedUtility(train, cfg, K=10, beta=10.0)
    rng = np.random.default_rng(0)
    gaps = [
        abs(truncated.eval(mask, x, int(y)) - full.eval(mask, x, int(y)))
        for mask, x, y in zip(rng.integers(0, 2, size=(20, 16)).astype(bool), held_out.features, held_out.labels)
    ]
    logger.info("measured truncated-utility gap on 16 points: %.4f", max(gaps))

    small = train.subset(np.arange(8))
    x, y = held_out.features[0], int(held_out.labels[0])
    full_game = ConvergedUtility(small, cfg).bind(x, y)
    truncated_game = TruncatedUtility(small, cfg, K=10, beta=10.0).bind(x, y)
    eps = np.abs(value_table(truncated_game) - value_table(full_game)).max()
    drift = np.abs(exact_shapley(truncated_game).values - exact_shapley(full_game).values)
    assert np.all(drift <= 2 * eps + 1e-12)


@pytest.mark.slow
def test_removing_high_value_points_hurts_more_than_random():
    cfg = TrainConfig(learning_rate=0.5, epochs=100, seed=1)
    exact_h, random_h = [], []
    for seed in range(20):
        blobs = generate(SyntheticSpec("gaussian-blobs", n=9, d=2, m=2, noise_std=1.0, seed=seed))
        train, test = blobs.split(1, seed=seed)
        x, y = test.features[0], int(test.labels[0])
        phi = exact_shapley(ConvergedUtility(train, cfg).bind(x, y)).values
        exact_h.append(removal_curve(train, phi, [0.25], cfg, test, seed=seed).h_values[0])
        random_h.append(removal_curve(train, random_ranking(train.n, seed), [0.25], cfg, test, seed=seed).h_values[0])

    assert np.mean(exact_h) >= np.mean(random_h)
    assert sign_test(exact_h, random_h) < 0.05


@pytest.mark.slow
def test_explainer_training_gets_cheaper_down_the_variants(blobs):
    service_cfg = TrainConfig(learning_rate=0.5, epochs=300, seed=0)
    arch = Architecture.logistic(blobs.d, blobs.m)
    seconds = {}
    for variant in ("FDS", "AFDS", "GFDS", "GFDS+"):
        cfg = ExplainerTrainConfig(variant, steps=60, batch_size=16, hidden_units=16, K=10, beta=10.0, N=2)
        start = time.perf_counter()
        train_explainer(blobs, cfg, service_cfg=service_cfg, partition=PartitionConfig(2, "by-label"), arch=arch)
        seconds[variant.lower()] = time.perf_counter() - start
    logger.info("explainer training seconds: %s", seconds)
    assert timing_order_violations(seconds) == []
