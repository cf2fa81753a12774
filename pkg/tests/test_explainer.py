import numpy as np
import pytest
import torch
from scipy.stats import spearmanr

from dataset import Dataset
from errors import ConfigError, DomainError
from explainer import (
    HEAD_PENALTY,
    HEAD_SPLIT,
    ExplainerTrainConfig,
    converged_provider,
    explainer_forward,
    explainer_loss,
    group_spread_penalty,
    init_explainer,
    load_explainer,
    predict_normalized,
    save_explainer,
    train_afds,
    train_fds,
    train_gfds,
    train_gfds_plus,
)
from grouping import GroupPartition, equal_partition
from model import TrainConfig
from shapley import exact_shapley
from utility import ConvergedUtility, TabularGame, additive_game, random_game


def _points(n, d=2, m=2, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset(rng.normal(size=(n, d)), np.arange(n) % m, m)


def _state(params):
    return [array.copy() for array in params.state_arrays().values()]


def test_forward_shape_and_label_check():
    params = init_explainer(n=5, d=3, m=4, hidden_units=8, seed=1)
    assert explainer_forward(params, np.zeros(3), 2).shape == (5,)
    with pytest.raises(DomainError):
        explainer_forward(params, np.zeros(3), 4)


def test_forward_is_seeded():
    first = init_explainer(4, 2, 2, 8, seed=3)
    second = init_explainer(4, 2, 2, 8, seed=3)
    assert np.array_equal(explainer_forward(first, np.ones(2), 1), explainer_forward(second, np.ones(2), 1))


def test_normalized_output_is_efficient():
    params = init_explainer(6, 2, 2, 8, seed=0)
    phi = predict_normalized(params, np.array([0.3, -0.1]), 0, 0.9, 0.5)
    assert phi.efficiency_gap <= 1e-12
    raw = explainer_forward(params, np.array([0.3, -0.1]), 0)
    assert np.allclose(np.diff(phi.values), np.diff(raw), atol=1e-14)


def test_split_head_divides_group_values():
    partition = GroupPartition(((0,), (1, 2)))
    params = init_explainer(3, 2, 2, 8, seed=0, head=HEAD_SPLIT, partition=partition)
    phi = predict_normalized(params, np.zeros(2), 1, 1.0, 0.0)
    assert phi.values[1] == phi.values[2]
    assert phi.efficiency_gap <= 1e-12


def test_zero_init():
    params = init_explainer(3, 2, 2, 8, seed=0, zero=True)
    assert np.all(explainer_forward(params, np.ones(2), 0) == 0.0)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExplainerTrainConfig(variant="SHAP")
    with pytest.raises(ConfigError):
        ExplainerTrainConfig(steps=-1)
    with pytest.raises(ConfigError):
        ExplainerTrainConfig(gfds_plus_head="wide")


def test_zero_steps_leaves_init():
    data = _points(4)
    cfg = ExplainerTrainConfig(steps=0, hidden_units=8, seed=5)
    params = train_fds(data, random_game(4, np.random.default_rng(0)), cfg)
    again = train_fds(data, random_game(4, np.random.default_rng(0)), cfg)
    assert all(np.array_equal(a, b) for a, b in zip(_state(params), _state(again)))
    assert params.losses.size == 0


def test_single_point_gives_whole_difference():
    data = _points(1)
    game = TabularGame(1, [0.25, 0.75])
    params = train_fds(data, game, ExplainerTrainConfig(steps=10, hidden_units=4))
    phi = predict_normalized(params, data.features[0], 0, game.grand(), game.empty())
    assert phi.values[0] == pytest.approx(0.5, abs=1e-15)


def test_training_is_deterministic():
    data = _points(5)
    game = random_game(5, np.random.default_rng(1))
    cfg = ExplainerTrainConfig(steps=30, batch_size=8, hidden_units=8, learning_rate=1e-2, seed=2)
    first, second = train_fds(data, game, cfg), train_fds(data, game, cfg)
    assert np.array_equal(first.losses, second.losses)
    assert all(np.array_equal(a, b) for a, b in zip(_state(first), _state(second)))


def test_single_group_gfds_matches_afds():
    data = _points(5)
    game = random_game(5, np.random.default_rng(4))
    afds = train_afds(data, None, ExplainerTrainConfig("AFDS", steps=25, batch_size=8, hidden_units=8, seed=6),
                      provider=game)
    gfds = train_gfds(data, None, equal_partition(5, 1),
                      ExplainerTrainConfig("GFDS", steps=25, batch_size=8, hidden_units=8, seed=6), provider=game)
    assert np.array_equal(afds.losses, gfds.losses)


def test_gfds_counts_updates():
    data = _points(6)
    game = random_game(6, np.random.default_rng(0))
    cfg = ExplainerTrainConfig("GFDS", steps=10, batch_size=4, hidden_units=8)
    params = train_gfds(data, None, equal_partition(6, 3), cfg, provider=game)
    assert params.losses.size == 12
    assert params.partition == equal_partition(6, 3)


def test_gfds_needs_group_count():
    data = _points(4)
    with pytest.raises(ConfigError):
        train_gfds(data, None, None, ExplainerTrainConfig("GFDS"), provider=random_game(4, np.random.default_rng(0)))


def test_gfds_plus_split_head_learns_group_split():
    data = _points(3)
    game = additive_game([0.2, 0.5, 0.3])
    cfg = ExplainerTrainConfig("GFDS+", steps=800, batch_size=16, hidden_units=16, learning_rate=1e-2, seed=0)
    params = train_gfds_plus(data, None, GroupPartition(((0,), (1, 2))), cfg, provider=game)
    for x in data.features:
        phi = predict_normalized(params, x, 0, game.grand(), game.empty())
        assert np.allclose(phi.values, [0.2, 0.4, 0.4], atol=0.05)


def test_gfds_plus_penalty_head_trains():
    data = _points(4)
    game = additive_game([0.1, 0.2, 0.3, 0.4])
    cfg = ExplainerTrainConfig("GFDS+", steps=20, batch_size=8, hidden_units=8, gamma=0.5,
                               gfds_plus_head=HEAD_PENALTY)
    params = train_gfds_plus(data, None, equal_partition(4, 2), cfg, provider=game)
    assert params.head == HEAD_PENALTY
    assert params.players == 4
    assert params.losses.size == 20 and np.all(np.isfinite(params.losses))


def test_spread_penalty_vanishes_on_flat_groups():
    flat = torch.tensor([[0.5, 0.5, 0.1, 0.1]], dtype=torch.float64)
    spread = torch.tensor([[0.9, 0.1, 0.1, 0.1]], dtype=torch.float64)
    partition = equal_partition(4, 2)
    assert group_spread_penalty(flat, partition).item() == pytest.approx(2e-6)
    assert group_spread_penalty(spread, partition).item() > 0.5


def test_explainer_loss_value():
    pred = torch.tensor([[0.1, 0.2]], dtype=torch.float64)
    # normalized to (0.25, 0.35); residual 0.4 - 0.25
    loss = explainer_loss(pred, np.array([[1, 0]]), np.array([0.4]), np.array([0.0]), np.array([0.6]))
    assert loss.item() == pytest.approx(0.15 ** 2)


@pytest.mark.parametrize("instance", range(20))
def test_loss_gradients_match_finite_differences(instance):
    rng = np.random.default_rng(instance)
    params = init_explainer(4, 3, 2, 6, seed=instance)
    X = torch.from_numpy(rng.normal(size=(5, 5)))
    masks = rng.integers(0, 2, size=(5, 4))
    v_s, v_zero, v_one = rng.uniform(size=5), rng.uniform(size=5), rng.uniform(size=5)
    partition = equal_partition(4, 2)

    def objective(inputs):
        pred = params.net(inputs)[:, :, 0]
        return explainer_loss(pred, masks, v_s, v_zero, v_one) + 0.3 * group_spread_penalty(pred, partition)

    assert torch.autograd.gradcheck(objective, (X.requires_grad_(),), eps=1e-6, atol=1e-5, rtol=1e-4)


def test_checkpoint_round_trip(tmp_path):
    data = _points(4)
    game = random_game(4, np.random.default_rng(0))
    cfg = ExplainerTrainConfig("GFDS+", steps=5, batch_size=4, hidden_units=8, seed=1)
    params = train_gfds_plus(data, None, equal_partition(4, 2), cfg, provider=game)
    save_explainer(params, tmp_path / "explainer")
    restored = load_explainer(tmp_path / "explainer")
    x = data.features[2]
    assert np.array_equal(explainer_forward(restored, x, 1), explainer_forward(params, x, 1))
    assert restored.partition == params.partition
    assert restored.metadata["variant"] == "GFDS+"
    assert np.array_equal(restored.losses, params.losses)


def _in_group_spread(params, data, game, partition):
    spreads = []
    for x in data.features:
        values = predict_normalized(params, x, 0, game.grand(), game.empty()).values
        spreads += [np.ptp(values[list(group)]) for group in partition.groups]
    return max(spreads)


@pytest.mark.slow
def test_spread_penalty_flattens_groups():
    data = _points(4)
    game = additive_game([0.1, 0.4, 0.2, 0.3])
    partition = equal_partition(4, 2)
    spreads = {}
    for gamma in (0.0, 1.0, 100.0):
        cfg = ExplainerTrainConfig("GFDS+", steps=1500, batch_size=16, hidden_units=16, learning_rate=5e-3,
                                   gamma=gamma, gfds_plus_head=HEAD_PENALTY, seed=0)
        params = train_gfds_plus(data, None, partition, cfg, provider=game)
        spreads[gamma] = _in_group_spread(params, data, game, partition)
    assert spreads[100.0] < 1e-2
    assert spreads[100.0] < spreads[0.0]


def test_afds_at_the_convergence_horizon_is_fds(blobs, fast_cfg):
    fds_cfg = ExplainerTrainConfig("FDS", steps=6, batch_size=4, hidden_units=8, learning_rate=1e-2, seed=3)
    afds_cfg = ExplainerTrainConfig("AFDS", steps=6, batch_size=4, hidden_units=8, learning_rate=1e-2, seed=3,
                                    K=fast_cfg.epochs, beta=1.0)
    fds = train_fds(blobs, converged_provider(blobs, fast_cfg), fds_cfg)
    afds = train_afds(blobs, fast_cfg, afds_cfg)
    assert fds.losses.size == 6
    assert np.array_equal(fds.losses, afds.losses)
    assert all(np.array_equal(a, b) for a, b in zip(_state(fds), _state(afds)))


@pytest.mark.slow
def test_afds_ranks_like_converged_exact_values(blobs):
    service_cfg = TrainConfig(learning_rate=0.1, epochs=300, seed=0)
    cfg = ExplainerTrainConfig("AFDS", steps=3000, batch_size=16, hidden_units=32, learning_rate=3e-3,
                               K=10, beta=10.0, seed=0)
    params = train_afds(blobs, service_cfg, cfg)
    full = ConvergedUtility(blobs, service_cfg)

    rhos = []
    for x, y in zip(blobs.features, blobs.labels):
        game = full.bind(x, int(y))
        phi = predict_normalized(params, x, int(y), game.grand(), game.empty())
        rhos.append(spearmanr(phi.values, exact_shapley(game).values).statistic)
    assert np.mean(rhos) >= 0.6


@pytest.mark.slow
def test_fds_gives_duplicated_points_matching_values():
    features = np.random.default_rng(0).normal(size=(5, 2))
    features[1] = features[0]
    data = Dataset(features, [0, 0, 1, 0, 1], 2)
    weights = np.array([0.25, 0.25, 0.05, 0.15, 0.3])
    # points 0 and 1 are interchangeable in the interaction term too
    game = TabularGame.from_function(5, lambda s: float(weights[s].sum()) + 0.1 * float(s[0] and s[1]) - 0.05 * s[4])
    cfg = ExplainerTrainConfig(steps=4000, batch_size=32, hidden_units=32, learning_rate=2e-3, seed=1)
    params = train_fds(data, game, cfg)
    for x in data.features:
        phi = predict_normalized(params, x, 0, game.grand(), game.empty()).values
        assert abs(phi[0] - phi[1]) < 0.1 * np.ptp(phi)


@pytest.mark.slow
def test_gfds_with_singleton_groups_approaches_exact():
    data = _points(6, seed=2)
    rng = np.random.default_rng(5)
    game = additive_game([0.05, 0.3, 0.1, 0.25, 0.15, 0.2]) + TabularGame(6, 0.05 * rng.uniform(size=64))
    exact = exact_shapley(game).values
    cfg = ExplainerTrainConfig("GFDS", steps=6000, batch_size=32, hidden_units=32, learning_rate=2e-3, seed=0)
    params = train_gfds(data, None, equal_partition(6, 6), cfg, provider=game)
    assert params.losses.size == 6000
    for x in data.features:
        phi = predict_normalized(params, x, 1, game.grand(), game.empty()).values
        assert spearmanr(phi, exact).statistic >= 0.9
        assert np.max(np.abs(phi - exact)) < 0.05


@pytest.mark.slow
def test_loss_settles_after_warmup():
    data = _points(5, seed=4)
    game = random_game(5, np.random.default_rng(8))
    steps, window = 2000, 200
    cfg = ExplainerTrainConfig(steps=steps, batch_size=32, hidden_units=16, learning_rate=1e-2, seed=0)
    losses = train_fds(data, game, cfg).losses
    running = np.convolve(losses, np.ones(window) / window, mode="valid")
    best = np.minimum.accumulate(running)
    settled = slice(steps // 5, None)
    assert np.all(running[settled] <= 1.1 * best[settled])
