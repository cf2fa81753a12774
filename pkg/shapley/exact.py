import itertools
import logging
import math

import numpy as np

from config import MAX_ENUMERATION_PLAYERS
from errors import CapacityError, MaskError, ValuationError
from helper import log_comb, popcounts
from shapley.vector import ShapleyVector
from utility import Game

logger = logging.getLogger(__name__)

CROSS_CHECK_PLAYERS = 7
MAX_PERMUTATION_PLAYERS = 9


def game_size(game: Game, n: int = None) -> int:
    if n is not None and n != game.n:
        raise MaskError(f"game has {game.n} players, caller passed n={n}")
    return game.n


def value_table(game: Game) -> np.ndarray:
    """v(s) for every mask integer s in [0, 2**n)."""
    if game.n > MAX_ENUMERATION_PLAYERS:
        raise CapacityError(f"cannot enumerate {game.n} players (limit {MAX_ENUMERATION_PLAYERS})")
    return np.asarray(game.values(np.arange(1 << game.n)), dtype=np.float64)


def shapley_from_table(table: np.ndarray, n: int) -> np.ndarray:
    """phi_i = 1/n * sum over s not containing i of C(n-1, |s|)^-1 (v(s + e_i) - v(s))."""
    masks = np.arange(1 << n)
    sizes = popcounts(n)
    weights = np.exp(-np.log(n) - log_comb(n - 1, np.arange(n)))
    phi = np.empty(n)
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        phi[i] = np.dot(weights[sizes[without]], table[without | bit] - table[without])
    return phi


def permutation_average_from_table(table: np.ndarray, n: int) -> np.ndarray:
    """Average marginal contribution over all n! orderings."""
    orders = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    prefixes = np.cumsum(np.left_shift(1, orders), axis=1)
    values = table[prefixes]
    marginals = np.diff(values, axis=1, prepend=table[0])
    phi = np.zeros(n)
    np.add.at(phi, orders, marginals)
    return phi / math.factorial(n)


def exact_shapley(game: Game, n: int = None, *, cross_check: bool = True) -> ShapleyVector:
    n = game_size(game, n)
    table = value_table(game)
    phi = shapley_from_table(table, n)
    if cross_check and n <= CROSS_CHECK_PLAYERS:
        by_order = permutation_average_from_table(table, n)
        if not np.allclose(phi, by_order, rtol=0.0, atol=1e-9):
            raise ValuationError("subset-sum and permutation-average Shapley values disagree")
    return ShapleyVector.certify(phi, table[-1], table[0])


def exact_shapley_by_permutations(game: Game, n: int = None) -> ShapleyVector:
    n = game_size(game, n)
    if n > MAX_PERMUTATION_PLAYERS:
        raise CapacityError(f"permutation enumeration is limited to {MAX_PERMUTATION_PLAYERS} players")
    table = value_table(game)
    return ShapleyVector.certify(permutation_average_from_table(table, n), table[-1], table[0])


def loo_values(game: Game, n: int = None) -> np.ndarray:
    """v(1) - v(1 - e_i) for each player."""
    n = game_size(game, n)
    full = (1 << n) - 1
    drops = full ^ (1 << np.arange(n))
    return game.grand() - game.values(drops)
