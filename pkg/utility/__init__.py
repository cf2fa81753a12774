from .games import BoundGame, Game, UtilityProvider
from .masks import SubsetMask, as_mask
from .providers import ConvergedUtility, SubModelUtility, TruncatedUtility, utility_afds, utility_full
from .tabular import (
    TabularGame,
    additive_game,
    constant_game,
    glove_game,
    inter_group_additive_game,
    load_tabular_game,
    random_game,
    save_tabular_game,
    tabular_eval,
    unanimity_game,
)

__all__ = [
    'BoundGame',
    'ConvergedUtility',
    'Game',
    'SubModelUtility',
    'SubsetMask',
    'TabularGame',
    'TruncatedUtility',
    'UtilityProvider',
    'additive_game',
    'as_mask',
    'constant_game',
    'glove_game',
    'inter_group_additive_game',
    'load_tabular_game',
    'random_game',
    'save_tabular_game',
    'tabular_eval',
    'unanimity_game',
    'utility_afds',
    'utility_full',
]
