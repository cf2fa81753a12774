from .owen import (
    ReducedGame,
    expand_group_mask,
    gfds_exact_values,
    gfds_expand,
    gfds_players,
    gfds_plus_values,
    group_shapley_values,
)
from .partition import (
    CoalitionSizeReport,
    GroupPartition,
    coalition_size,
    equal_partition,
    optimal_group_count,
    psi_partition,
)

__all__ = [
    'CoalitionSizeReport',
    'GroupPartition',
    'ReducedGame',
    'coalition_size',
    'equal_partition',
    'expand_group_mask',
    'gfds_exact_values',
    'gfds_expand',
    'gfds_players',
    'gfds_plus_values',
    'group_shapley_values',
    'optimal_group_count',
    'psi_partition',
]
