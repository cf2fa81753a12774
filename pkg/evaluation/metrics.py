import numpy as np

from dataset import Dataset
from errors import DomainError
from model import ModelParams, predict_proba

PROB_FLOOR = 1e-12


def value_loss(test_set: Dataset, model: ModelParams) -> float:
    """H(T): mean cross-entropy of the model's softmax output against the true labels."""
    if test_set.n == 0:
        raise DomainError("value loss needs a nonempty test set")
    proba = predict_proba(model, test_set.features)
    picked = proba[np.arange(test_set.n), test_set.labels]
    return float(-np.log(np.clip(picked, PROB_FLOOR, None)).mean())
