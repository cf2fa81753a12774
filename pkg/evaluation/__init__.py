from .metrics import value_loss
from .removal import RemovalCurve, average_curves, check_etas, random_ranking, removal_curve, removal_order, retrain
from .rewards import RewardSplit, allocate_provider_rewards, allocate_rewards
from .stats import Summary, sign_test, summarize

__all__ = [
    'RemovalCurve',
    'RewardSplit',
    'Summary',
    'allocate_provider_rewards',
    'allocate_rewards',
    'average_curves',
    'check_etas',
    'random_ranking',
    'removal_curve',
    'removal_order',
    'retrain',
    'sign_test',
    'summarize',
    'value_loss',
]
