import abc
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from cachetools import LRUCache

from config import VALUE_CACHE_SIZE
from utility.masks import SubsetMask, as_mask


def x_key(x) -> bytes:
    if x is None:
        return b""
    return np.ascontiguousarray(x, dtype=np.float64).tobytes()


class Game(abc.ABC):
    """A characteristic function over n players; what every Shapley solver consumes."""

    n: int

    @abc.abstractmethod
    def value(self, mask) -> float:
        """Returns v(mask) for a length-n coalition mask."""

    def values(self, int_masks: np.ndarray) -> np.ndarray:
        """Batch of v(mask) for masks given as little-endian integers."""
        return np.array([self.value(SubsetMask.from_int(int(i), self.n)) for i in int_masks], dtype=np.float64)

    def grand(self) -> float:
        return self.value(SubsetMask.ones(self.n))

    def empty(self) -> float:
        return self.value(SubsetMask.zeros(self.n))


class UtilityProvider(abc.ABC):
    """Maps (mask, x, y) to a real utility; v(1) and v(0) are cached per (x, y)."""

    def __init__(self, n: int, threads: int = 1):
        self.n = n
        self.threads = max(1, int(threads))
        self._endpoints = LRUCache(maxsize=VALUE_CACHE_SIZE)
        self._endpoint_lock = threading.Lock()

    @abc.abstractmethod
    def eval(self, mask, x, y) -> float:
        """Deterministic utility of the coalition for test point x and label y."""

    def eval_many(self, masks, x, y) -> np.ndarray:
        masks = [as_mask(mask, self.n) for mask in masks]
        if self.threads == 1 or len(masks) < 2:
            return np.array([self.eval(mask, x, y) for mask in masks], dtype=np.float64)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return np.fromiter(pool.map(lambda mask: self.eval(mask, x, y), masks), dtype=np.float64, count=len(masks))

    def _endpoint(self, which: str, x, y) -> float:
        key = (which, x_key(x), int(y))
        with self._endpoint_lock:
            if key in self._endpoints:
                return self._endpoints[key]
        mask = SubsetMask.ones(self.n) if which == "one" else SubsetMask.zeros(self.n)
        value = self.eval(mask, x, y)
        with self._endpoint_lock:
            self._endpoints[key] = value
        return value

    def v_one(self, x, y) -> float:
        return self._endpoint("one", x, y)

    def v_zero(self, x, y) -> float:
        return self._endpoint("zero", x, y)

    def bind(self, x, y) -> "BoundGame":
        return BoundGame(self, x, y)


class BoundGame(Game):
    """The game v_{x,y} obtained by fixing the test point and label of a provider."""

    def __init__(self, provider: UtilityProvider, x, y: int):
        self.provider = provider
        self.x = None if x is None else np.asarray(x, dtype=np.float64)
        self.y = y
        self.n = provider.n

    def value(self, mask) -> float:
        return self.provider.eval(as_mask(mask, self.n), self.x, self.y)

    def values(self, int_masks: np.ndarray) -> np.ndarray:
        masks = [SubsetMask.from_int(int(i), self.n) for i in int_masks]
        return self.provider.eval_many(masks, self.x, self.y)

    def grand(self) -> float:
        return self.provider.v_one(self.x, self.y)

    def empty(self) -> float:
        return self.provider.v_zero(self.x, self.y)
