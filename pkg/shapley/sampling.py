import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from errors import DomainError
from helper import log_comb, make_rng
from shapley.exact import game_size
from shapley.vector import ShapleyVector
from utility import Game, SubsetMask

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION_FRACTION = 0.001


def permutation_shapley(
        game: Game,
        n: int = None,
        permutations="all",
        truncation_tol: float = None,
        seed: int = 0,
) -> ShapleyVector:
    """
    Truncated Monte Carlo Shapley.

    Averages marginal contributions over random orderings (or all n! orderings
    when permutations == "all"). Within an ordering, once the prefix value is
    within truncation_tol of v(1) the remaining marginals are taken as zero.
    truncation_tol defaults to 0.001 * |v(1) - v(0)|; pass 0 for the unbiased
    estimator.
    """
    n = game_size(game, n)
    v_one, v_zero = game.grand(), game.empty()
    if truncation_tol is None:
        truncation_tol = DEFAULT_TRUNCATION_FRACTION * abs(v_one - v_zero)

    if permutations == "all":
        orders = itertools.permutations(range(n))
        count = math.factorial(n)
    else:
        if int(permutations) < 1:
            raise DomainError(f"need at least one permutation, got {permutations}")
        count = int(permutations)
        rng = make_rng(seed)
        orders = (rng.permutation(n) for _ in range(count))

    phi = np.zeros(n)
    truncated = 0
    for order in orders:
        bits = np.zeros(n, dtype=bool)
        previous = v_zero
        for player in order:
            if abs(previous - v_one) < truncation_tol:
                truncated += 1
                break
            bits[player] = True
            current = game.value(SubsetMask(bits))
            phi[player] += current - previous
            previous = current

    logger.debug("permutation sampling: %d orderings, %d truncated", count, truncated)
    return ShapleyVector.certify(phi / count, v_one, v_zero)


def kernel_weight(n: int, k: int) -> float:
    """Unnormalized Shapley kernel weight (n - 1) / (C(n, k) k (n - k)) of one size-k subset."""
    if not 0 < k < n:
        raise DomainError(f"kernel weight undefined for k={k}, n={n}")
    return float(np.exp(np.log(n - 1) - log_comb(n, k) - np.log(k) - np.log(n - k)))


def kernel_weights(n: int, sizes: np.ndarray) -> np.ndarray:
    sizes = np.asarray(sizes, dtype=np.float64)
    return np.exp(np.log(n - 1) - log_comb(n, sizes) - np.log(sizes) - np.log(n - sizes))


def kernel_size_distribution(n: int) -> np.ndarray:
    """P(|s| = k) for k = 1..n-1, proportional to C(n, k) * kernel_weight(n, k)."""
    sizes = np.arange(1, n)
    mass = 1.0 / (sizes * (n - sizes))
    return mass / mass.sum()


@dataclass(frozen=True)
class KernelSample:
    mask: SubsetMask
    size: int
    weight: float


def kernel_sample_batch(n: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """count x n boolean masks drawn from the Shapley kernel; never empty or full."""
    if n < 2:
        raise DomainError(f"kernel sampling needs n >= 2, got {n}")
    sizes = rng.choice(np.arange(1, n), size=count, p=kernel_size_distribution(n))
    # rank of uniform keys gives a uniform random ordering per row
    ranks = np.argsort(np.argsort(rng.random((count, n)), axis=1), axis=1)
    return ranks < sizes[:, None]


def kernel_sample(n: int, rng: np.random.Generator) -> KernelSample:
    mask = SubsetMask(kernel_sample_batch(n, rng, 1)[0])
    return KernelSample(mask, mask.popcount, kernel_weight(n, mask.popcount))
