import struct
from dataclasses import replace

import numpy as np
import pytest

from dataset import Dataset, SyntheticSpec, generate
from errors import ArchitectureError, ModelError
from model import (
    Architecture,
    TrainConfig,
    accuracy,
    from_bytes,
    init,
    loss_and_gradients,
    pack_arrays,
    predict_logits,
    predict_proba,
    to_bytes,
    to_json,
    train,
    zeros,
)
from model.serialization import BLOB_MAGIC


def _relative_error(analytic, numeric):
    return np.linalg.norm(analytic - numeric) / max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)


@pytest.mark.parametrize("instance", range(20))
def test_gradients_match_central_differences(instance):
    rng = np.random.default_rng(instance)
    d, m = 3, 3
    arch = Architecture.mlp1(d, m, 4) if instance % 2 else Architecture.logistic(d, m)
    params = init(arch, seed=instance)
    X = rng.standard_normal((5, d))
    Y = np.eye(m)[rng.integers(m, size=5)]
    _, grads = loss_and_gradients(params, X, Y)

    h = 1e-6
    for array, grad in zip(params.arrays(), grads):
        numeric = np.zeros_like(array)
        for index in np.ndindex(array.shape):
            original = array[index]
            array[index] = original + h
            up, _ = loss_and_gradients(params, X, Y)
            array[index] = original - h
            down, _ = loss_and_gradients(params, X, Y)
            array[index] = original
            numeric[index] = (up - down) / (2 * h)
        assert _relative_error(grad, numeric) < 1e-4


def test_init_is_seeded():
    arch = Architecture.mlp1(2, 2, 3)
    assert init(arch, 7).equals(init(arch, 7))
    assert not init(arch, 7).equals(init(arch, 8))


def test_zero_model_is_uniform():
    params = zeros(Architecture.logistic(2, 4))
    assert np.allclose(predict_proba(params, np.array([1.0, -2.0])), 0.25)


def test_saturated_logits_keep_probabilities_positive():
    params = zeros(Architecture.logistic(2, 2))
    params.biases[0][:] = [1000.0, 0.0]
    probabilities = predict_proba(params, np.zeros((3, 2)))
    assert np.all(probabilities > 0.0)
    assert np.all(np.isfinite(np.log(probabilities)))
    assert np.allclose(probabilities[:, 0], 1.0)


def test_predict_shapes_and_dimension_check():
    params = init(Architecture.logistic(2, 3), 0)
    assert predict_logits(params, np.zeros(2)).shape == (3,)
    assert predict_proba(params, np.zeros((4, 2))).shape == (4, 3)
    assert np.allclose(predict_proba(params, np.ones((4, 2))).sum(axis=1), 1.0)
    with pytest.raises(ModelError):
        predict_logits(params, np.zeros(3))


def test_architecture_validation():
    with pytest.raises(ArchitectureError):
        Architecture("cnn", 2, 2)
    with pytest.raises(ArchitectureError):
        Architecture.mlp1(2, 2, 0)


@pytest.mark.parametrize("field,value", [("learning_rate", 0.0), ("lr_scale", -1.0), ("batch_size", 0), ("epochs", -1)])
def test_train_config_validation(field, value):
    with pytest.raises(ModelError):
        TrainConfig(**{field: value})


def test_training_fits_separable_data(blobs):
    params = init(Architecture.logistic(blobs.d, blobs.m), 0)
    result = train(params, blobs, TrainConfig(learning_rate=0.5, epochs=200, convergence_tol=0.0))
    assert accuracy(result.params, blobs) == 1.0
    assert result.losses[-1] < result.losses[0]
    # the input parameters are left untouched
    assert params.equals(init(Architecture.logistic(blobs.d, blobs.m), 0))


def test_training_is_deterministic(blobs, fast_cfg):
    arch = Architecture.mlp1(blobs.d, blobs.m, 5)
    cfg = replace(fast_cfg, batch_size=3)
    first = train(init(arch, 1), blobs, cfg)
    second = train(init(arch, 1), blobs, cfg)
    assert first.params.equals(second.params)
    assert np.array_equal(first.losses, second.losses)


def test_lr_scale_equals_scaled_learning_rate(blobs, fast_cfg):
    arch = Architecture.logistic(blobs.d, blobs.m)
    scaled = train(init(arch, 2), blobs, replace(fast_cfg, learning_rate=0.05, lr_scale=10.0))
    direct = train(init(arch, 2), blobs, replace(fast_cfg, learning_rate=0.5))
    assert np.allclose(scaled.params.weights[0], direct.params.weights[0], rtol=1e-12, atol=1e-12)


def test_snapshots_follow_epochs(blobs, fast_cfg):
    result = train(init(Architecture.logistic(2, 2), 0), blobs, fast_cfg, record_snapshots=True)
    assert len(result.snapshots) == fast_cfg.epochs == result.epochs_run
    assert result.snapshots[-1].equals(result.params)


def test_convergence_stops_early():
    overlapping = generate(SyntheticSpec("gaussian-blobs", n=40, noise_std=3.0, seed=4))
    cfg = TrainConfig(learning_rate=0.5, epochs=5000, convergence_tol=1e-3)
    result = train(init(Architecture.logistic(2, 2), 0), overlapping, cfg, stop_on_convergence=True)
    assert result.epochs_run < 5000


def test_empty_data_is_rejected(fast_cfg):
    empty = Dataset(np.zeros((0, 2)), np.zeros(0, dtype=int), 2)
    params = init(Architecture.logistic(2, 2), 0)
    with pytest.raises(ModelError, match="utility layer"):
        train(params, empty, fast_cfg)
    assert train(params, empty, fast_cfg, allow_empty=True).params.equals(params)


def test_blob_round_trip_is_exact():
    params = init(Architecture.mlp1(3, 2, 4), 9)
    restored = from_bytes(to_bytes(params))
    assert restored.equals(params)
    assert restored.init_seed == 9
    assert to_bytes(restored) == to_bytes(params)


def test_corrupt_blob_is_rejected():
    blob = to_bytes(init(Architecture.logistic(2, 2), 0))
    with pytest.raises(ModelError):
        from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ModelError):
        from_bytes(blob[:-8])


def test_foreign_blobs_are_rejected():
    bad_header = b"{not json"
    with pytest.raises(ModelError, match="header"):
        from_bytes(BLOB_MAGIC + struct.pack("<II", 1, len(bad_header)) + bad_header)
    with pytest.raises(ModelError):
        from_bytes(BLOB_MAGIC[:3])
    explainer_blob = pack_arrays({"kind": "explainer", "names": ["w"]}, [np.ones((2, 2))])
    with pytest.raises(ModelError, match="not a service model"):
        from_bytes(explainer_blob)


def test_json_export():
    payload = to_json(init(Architecture.logistic(2, 3), 0))
    assert payload["architecture"]["kind"] == "logistic"
    assert np.array(payload["layers"][0]["weights"]).shape == (2, 3)
