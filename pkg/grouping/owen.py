"""
Grouped games over a partition of the training data.

GFDS: for a datum j in group G, the reduced game has |G| + N - 1 players; the
members of G (ascending index) play individually and every other group (in
group order) plays as one macro-player that joins all-or-none.

GFDS+: every group is one player of an N-player game and a group's Shapley
value is split evenly among its members.
"""

import numpy as np

from config import MAX_ENUMERATION_PLAYERS
from errors import CapacityError, MaskError
from grouping.partition import GroupPartition
from shapley import exact_shapley
from utility import Game, SubsetMask


def gfds_players(j: int, partition: GroupPartition) -> list[tuple]:
    """Reduced players seen by datum j, each as the tuple of datum indices it stands for."""
    own = partition.group_of[j]
    players = [(i,) for i in partition.groups[own]]
    players += [group for g, group in enumerate(partition.groups) if g != own]
    return players


def _expand(players: list[tuple], s_hat, n: int) -> SubsetMask:
    s_hat = np.asarray(s_hat.bits if isinstance(s_hat, SubsetMask) else s_hat, dtype=bool).reshape(-1)
    if s_hat.size != len(players):
        raise MaskError(f"reduced mask has length {s_hat.size}, expected {len(players)}")
    bits = np.zeros(n, dtype=bool)
    for present, members in zip(s_hat, players):
        if present:
            bits[list(members)] = True
    return SubsetMask(bits)


def gfds_expand(j: int, partition: GroupPartition, s_hat) -> SubsetMask:
    """Maps a coalition over j's reduced players back to a length-n mask."""
    return _expand(gfds_players(j, partition), s_hat, partition.n)


def expand_group_mask(partition: GroupPartition, s_plus) -> SubsetMask:
    """Maps an N-player group coalition to a length-n mask."""
    return _expand(list(partition.groups), s_plus, partition.n)


class ReducedGame(Game):
    """v restricted to coalitions built from atomic blocks of players."""

    def __init__(self, game: Game, players: list[tuple]):
        self.game = game
        self.players = players
        self.n = len(players)
        self._block_ints = np.array([sum(1 << i for i in block) for block in players], dtype=np.int64)

    def expanded_ints(self, int_masks: np.ndarray) -> np.ndarray:
        bits = (np.asarray(int_masks, dtype=np.int64)[:, None] >> np.arange(self.n)) & 1
        return bits @ self._block_ints

    def value(self, mask) -> float:
        return self.game.value(_expand(self.players, mask, self.game.n))

    def values(self, int_masks: np.ndarray) -> np.ndarray:
        return self.game.values(self.expanded_ints(int_masks))

    def grand(self) -> float:
        return self.game.grand()

    def empty(self) -> float:
        return self.game.empty()


def gfds_exact_values(game: Game, partition: GroupPartition) -> np.ndarray:
    """Exact Shapley value of each datum in its own group's reduced game."""
    if partition.n != game.n:
        raise MaskError(f"partition covers {partition.n} points, game has {game.n} players")
    largest = int(partition.sizes.max()) + partition.N - 1
    if largest > MAX_ENUMERATION_PLAYERS:
        raise CapacityError(f"reduced games reach {largest} players (limit {MAX_ENUMERATION_PLAYERS})")

    values = np.empty(game.n)
    for group in partition.groups:
        reduced = ReducedGame(game, gfds_players(group[0], partition))
        phi = exact_shapley(reduced, cross_check=False).values
        values[list(group)] = phi[:len(group)]
    return values


def group_shapley_values(game: Game, partition: GroupPartition) -> np.ndarray:
    """Shapley values of the N-player game whose players are whole groups."""
    if partition.n != game.n:
        raise MaskError(f"partition covers {partition.n} points, game has {game.n} players")
    if partition.N > MAX_ENUMERATION_PLAYERS:
        raise CapacityError(f"{partition.N} groups exceed the enumeration limit {MAX_ENUMERATION_PLAYERS}")
    return exact_shapley(ReducedGame(game, list(partition.groups)), cross_check=False).values


def gfds_plus_values(game: Game, partition: GroupPartition) -> np.ndarray:
    return (group_shapley_values(game, partition) / partition.sizes)[partition.group_of]

