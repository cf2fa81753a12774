from pathlib import Path

import numpy as np

from config import MAX_ENUMERATION_PLAYERS
from errors import CapacityError, DomainError
from helper import bits_matrix
from utility.games import Game, UtilityProvider
from utility.masks import as_mask


class TabularGame(UtilityProvider, Game):
    """Explicit table of all 2**n utilities, indexed by mask integer; ignores (x, y)."""

    def __init__(self, n: int, table):
        if n > MAX_ENUMERATION_PLAYERS:
            raise CapacityError(f"tabular games hold at most {MAX_ENUMERATION_PLAYERS} players, got {n}")
        if n < 1:
            raise DomainError("a game needs at least one player")
        table = np.array(table, dtype=np.float64)
        if table.shape != (1 << n,):
            raise DomainError(f"table must have 2**{n} = {1 << n} entries, got {table.size}")
        table.setflags(write=False)
        super().__init__(n)
        self.table = table

    @classmethod
    def from_function(cls, n: int, fn) -> "TabularGame":
        """fn receives a boolean membership vector."""
        return cls(n, [fn(row) for row in bits_matrix(n)])

    def value(self, mask) -> float:
        return float(self.table[as_mask(mask, self.n).to_int()])

    def values(self, int_masks: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(int_masks, dtype=np.int64)]

    def eval(self, mask, x=None, y=None) -> float:
        return self.value(mask)

    def grand(self) -> float:
        return float(self.table[-1])

    def empty(self) -> float:
        return float(self.table[0])

    def __add__(self, other: "TabularGame") -> "TabularGame":
        return TabularGame(self.n, self.table + other.table)


def tabular_eval(game: TabularGame, mask) -> float:
    return game.value(mask)


def load_tabular_game(path) -> TabularGame:
    """First line n, then 2**n lines 'maskInteger value'."""
    try:
        lines = [line for line in Path(path).read_text().splitlines() if line.strip()]
    except (OSError, UnicodeDecodeError) as e:
        raise DomainError(f"{path}: cannot read game file ({e})") from None
    if not lines:
        raise DomainError(f"{path}: empty game file")
    try:
        n = int(lines[0])
    except ValueError:
        raise DomainError(f"{path}: first line must be the player count, got {lines[0].strip()!r}") from None
    if n < 1:
        raise DomainError(f"{path}: a game needs at least one player, got n={n}")
    if n > MAX_ENUMERATION_PLAYERS:
        raise CapacityError(f"{path}: tabular games hold at most {MAX_ENUMERATION_PLAYERS} players, got {n}")
    try:
        rows = np.loadtxt(lines[1:], ndmin=2) if len(lines) > 1 else np.zeros((0, 2))
    except ValueError as e:
        raise DomainError(f"{path}: every coalition line must read 'mask value' ({e})") from None
    if rows.shape != (1 << n, 2):
        raise DomainError(f"{path}: expected {1 << n} 'mask value' lines, got {rows.shape[0]}")
    masks = rows[:, 0].astype(np.int64)
    if not np.array_equal(np.sort(masks), np.arange(1 << n)):
        raise DomainError(f"{path}: every mask in [0, 2**{n}) must appear exactly once")
    table = np.empty(1 << n)
    table[masks] = rows[:, 1]
    return TabularGame(n, table)


def save_tabular_game(game: TabularGame, path):
    body = "\n".join(f"{mask} {value!r}" for mask, value in enumerate(game.table.tolist()))
    Path(path).write_text(f"{game.n}\n{body}\n")


def additive_game(weights) -> TabularGame:
    weights = np.asarray(weights, dtype=np.float64)
    return TabularGame.from_function(len(weights), lambda s: float(weights[s].sum()))


def unanimity_game(n: int) -> TabularGame:
    return TabularGame.from_function(n, lambda s: float(s.all()))


def glove_game() -> TabularGame:
    """Player 0 holds a left glove, players 1 and 2 right gloves; a pair is worth 1."""
    return TabularGame.from_function(3, lambda s: float(s[0] and (s[1] or s[2])))


def constant_game(n: int, value: float = 1.0) -> TabularGame:
    return TabularGame(n, np.full(1 << n, value))


def random_game(n: int, rng: np.random.Generator) -> TabularGame:
    return TabularGame(n, rng.uniform(0.0, 1.0, size=1 << n))


def inter_group_additive_game(groups, rng: np.random.Generator) -> TabularGame:
    """v(s) = sum over groups g of u_g(s restricted to g), each u_g a random table on g's subsets."""
    n = sum(len(group) for group in groups)
    tables = [rng.uniform(0.0, 1.0, size=1 << len(group)) for group in groups]

    def value(s):
        total = 0.0
        for group, table in zip(groups, tables):
            local = sum(1 << k for k, member in enumerate(group) if s[member])
            total += table[local]
        return total

    return TabularGame.from_function(n, value)
