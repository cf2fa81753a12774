import logging
from dataclasses import dataclass

import numpy as np

from errors import RewardError
from shapley import ShapleyVector

logger = logging.getLogger(__name__)

ZERO_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RewardSplit:
    per_provider: np.ndarray
    total: float
    clamped: bool = False


def _values(phi) -> np.ndarray:
    return np.asarray(phi.values if isinstance(phi, ShapleyVector) else phi, dtype=np.float64)


def allocate_rewards(phi, c: float) -> RewardSplit:
    """c_i = phi_i * c / sum(phi); negative attributions are clamped to zero first."""
    if c < 0:
        raise RewardError(f"reward total must be non-negative, got {c}")
    values = _values(phi)
    if abs(values.sum()) <= ZERO_SUM_TOL:
        raise RewardError("attributions sum to zero; the split is undefined")
    clamped = bool((values < 0).any())
    if clamped:
        logger.warning("clamping %d negative attributions to zero", int((values < 0).sum()))
        values = np.clip(values, 0.0, None)
    total = values.sum()
    if total <= ZERO_SUM_TOL:
        raise RewardError("no positive attribution left after clamping")
    return RewardSplit(values * c / total, float(c), clamped)


def allocate_provider_rewards(phi, c: float, provider_ids) -> dict:
    """Sums each provider's data-point rewards; several points may share one provider."""
    split = allocate_rewards(phi, c)
    provider_ids = np.asarray(provider_ids)
    if provider_ids.shape != split.per_provider.shape:
        raise RewardError(f"{provider_ids.size} provider ids for {split.per_provider.size} attributions")
    owners = np.unique(provider_ids)
    return {owner.item(): float(split.per_provider[provider_ids == owner].sum()) for owner in owners}
