import logging
import threading
from dataclasses import dataclass

from cachetools import LRUCache

from config import VALUE_CACHE_SIZE
from utility.games import UtilityProvider, x_key
from utility.masks import as_mask

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CacheStats:
    hits: int
    misses: int
    size: int


class CachedUtility(UtilityProvider):
    """Memoizes eval on (mask bits, x, y); identical keys always carry identical values."""

    def __init__(self, provider: UtilityProvider, maxsize: int = VALUE_CACHE_SIZE):
        super().__init__(provider.n, provider.threads)
        self.provider = provider
        self.cache = LRUCache(maxsize=maxsize)
        self.lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __getattr__(self, name):
        # m, data, trainings, ... of the wrapped provider
        provider = self.__dict__.get("provider")
        if provider is None:
            raise AttributeError(name)
        return getattr(provider, name)

    def eval(self, mask, x, y) -> float:
        mask = as_mask(mask, self.n)
        key = (mask.key(), x_key(x), int(y) if y is not None else None)
        with self.lock:
            if key in self.cache:
                self.hits += 1
                return self.cache[key]
            self.misses += 1
        value = self.provider.eval(mask, x, y)
        with self.lock:
            self.cache[key] = value
        return value

    def stats(self) -> CacheStats:
        with self.lock:
            return CacheStats(self.hits, self.misses, len(self.cache))

    def clear(self):
        with self.lock:
            self.cache.clear()
        logger.debug("utility cache cleared")


def cache_wrap(provider: UtilityProvider, maxsize: int = VALUE_CACHE_SIZE) -> CachedUtility:
    return CachedUtility(provider, maxsize)
