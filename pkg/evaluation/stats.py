from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float
    count: int


def summarize(values) -> Summary:
    values = np.asarray(values, dtype=np.float64)
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return Summary(float(values.mean()), std, int(values.size))


def sign_test(first, second) -> float:
    """One-sided p-value that first > second more often than not; ties are dropped."""
    diff = np.asarray(first, dtype=np.float64) - np.asarray(second, dtype=np.float64)
    wins = int((diff > 0).sum())
    trials = int((diff != 0).sum())
    if trials == 0:
        return 1.0
    return float(binomtest(wins, trials, 0.5, alternative="greater").pvalue)
