import hashlib
from pathlib import Path

import numpy as np
from scipy.special import gammaln

SEED_MASK = (1 << 64) - 1


def derive_seed(root: int, *names) -> int:
    """Derives a named 64-bit substream seed from a root seed."""
    digest = hashlib.sha256(repr((int(root) & SEED_MASK, *names)).encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(*seeds: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(s) & SEED_MASK for s in seeds]))


def log_comb(n, k):
    return gammaln(np.asarray(n) + 1) - gammaln(np.asarray(k) + 1) - gammaln(np.asarray(n) - np.asarray(k) + 1)


def comb(n, k):
    return np.exp(log_comb(n, k))


def popcounts(n: int) -> np.ndarray:
    """Popcount of every integer in [0, 2**n)."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        counts += (np.arange(1 << n) >> bit) & 1
    return counts


def bits_matrix(n: int) -> np.ndarray:
    """Row r is the little-endian bit vector of integer r, shape (2**n, n)."""
    return ((np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)


def array_digest(*arrays: np.ndarray) -> str:
    sha = hashlib.sha256()
    for array in arrays:
        array = np.ascontiguousarray(array)
        sha.update(str(array.dtype).encode())
        sha.update(str(array.shape).encode())
        sha.update(array.tobytes())
    return sha.hexdigest()


def file_digest(path) -> str:
    sha = hashlib.sha256()
    with open(Path(path), "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            sha.update(chunk)
    return sha.hexdigest()
