from .checkpoint import load_explainer, save_explainer
from .network import (
    HEAD_N_DIM,
    HEAD_PENALTY,
    HEAD_SPLIT,
    ExplainerNet,
    ExplainerParams,
    encode_inputs,
    explainer_forward,
    init_explainer,
    predict_normalized,
    raw_outputs,
)
from .training import (
    ExplainerTrainConfig,
    PartitionConfig,
    converged_provider,
    explainer_loss,
    group_spread_penalty,
    normalize_batch,
    train_afds,
    train_explainer,
    train_fds,
    train_gfds,
    train_gfds_plus,
    truncated_provider,
)

__all__ = [
    'HEAD_N_DIM',
    'HEAD_PENALTY',
    'HEAD_SPLIT',
    'ExplainerNet',
    'ExplainerParams',
    'ExplainerTrainConfig',
    'PartitionConfig',
    'converged_provider',
    'encode_inputs',
    'explainer_forward',
    'explainer_loss',
    'group_spread_penalty',
    'init_explainer',
    'load_explainer',
    'normalize_batch',
    'predict_normalized',
    'raw_outputs',
    'save_explainer',
    'train_afds',
    'train_explainer',
    'train_fds',
    'train_gfds',
    'train_gfds_plus',
    'truncated_provider',
]
