from .classifier import (
    Architecture,
    ModelParams,
    TrainConfig,
    TrainResult,
    accuracy,
    init,
    loss_and_gradients,
    predict_logits,
    predict_proba,
    train,
    zeros,
)
from .serialization import from_bytes, pack_arrays, to_bytes, to_json, unpack_arrays

__all__ = [
    'Architecture',
    'ModelParams',
    'TrainConfig',
    'TrainResult',
    'accuracy',
    'from_bytes',
    'init',
    'loss_and_gradients',
    'pack_arrays',
    'predict_logits',
    'predict_proba',
    'to_bytes',
    'to_json',
    'train',
    'unpack_arrays',
    'zeros',
]
