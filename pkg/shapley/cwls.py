"""
Shapley values as the solution of a constrained weighted least squares problem:

    min_phi  sum_s P(s) (v(s) - v(0) - s^T phi)^2   s.t.  1^T phi = v(1) - v(0)

solved through the KKT system of the constrained normal equations. Enumerate
mode sums over every proper nonempty coalition with Shapley kernel weights and
recovers the exact Shapley values; sampled mode averages over kernel draws.
"""

import logging

import numpy as np
from scipy.linalg import solve

from config import MAX_ENUMERATION_PLAYERS
from errors import CapacityError, DomainError
from helper import comb, make_rng, popcounts
from shapley.exact import game_size
from shapley.sampling import kernel_sample_batch, kernel_weights
from shapley.vector import ShapleyVector
from utility import Game

logger = logging.getLogger(__name__)

RIDGE = 1e-10


def _enumerated_system(game: Game, n: int, v_zero: float) -> tuple[np.ndarray, np.ndarray]:
    if n > MAX_ENUMERATION_PLAYERS:
        raise CapacityError(f"cannot enumerate {n} players (limit {MAX_ENUMERATION_PLAYERS})")
    masks = np.arange(1, (1 << n) - 1)
    sizes = popcounts(n)[masks]
    weighted = kernel_weights(n, sizes) * (game.values(masks) - v_zero)

    # A_ii sums kernel weights of coalitions holding i, A_ij of those holding both.
    k = np.arange(1, n)
    per_size = kernel_weights(n, k)
    diagonal = np.sum(comb(n - 1, k - 1) * per_size)
    off_diagonal = np.sum(comb(n - 2, k - 2) * per_size) if n > 2 else 0.0
    A = np.full((n, n), off_diagonal) + (diagonal - off_diagonal) * np.eye(n)
    c = np.array([weighted[((masks >> i) & 1) == 1].sum() for i in range(n)])
    return A, c


def _sampled_system(game: Game, n: int, v_zero: float, num_samples: int, seed: int):
    if num_samples < 1:
        raise DomainError(f"sampled mode needs at least one sample, got {num_samples}")
    S = kernel_sample_batch(n, make_rng(seed), num_samples)
    masks = S.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))
    b = game.values(masks) - v_zero
    S = S.astype(np.float64)
    return S.T @ S / num_samples, S.T @ b / num_samples


def cwls_solve(
        game: Game,
        n: int = None,
        mode: str = "enumerate",
        num_samples: int = None,
        seed: int = 0,
) -> ShapleyVector:
    n = game_size(game, n)
    v_one, v_zero = game.grand(), game.empty()
    if n == 1:
        return ShapleyVector.certify([v_one - v_zero], v_one, v_zero)

    if mode == "enumerate":
        A, c = _enumerated_system(game, n, v_zero)
    elif mode == "sampled":
        A, c = _sampled_system(game, n, v_zero, num_samples or 0, seed)
    else:
        raise DomainError(f"unknown CWLS mode {mode!r}")

    kkt = np.zeros((n + 1, n + 1))
    kkt[:n, :n] = A + RIDGE * np.eye(n)
    kkt[:n, n] = 1.0
    kkt[n, :n] = 1.0
    rhs = np.append(c, v_one - v_zero)
    phi = solve(kkt, rhs, assume_a="sym")[:n]
    return ShapleyVector.certify(phi, v_one, v_zero)
