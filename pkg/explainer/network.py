"""
The amortized explainer phi_theta(x, y).

A one-hidden-layer network reads the features concatenated with the one-hot
label and emits a players x m grid; the column of label y is the attribution
vector. players is n for every head except the GFDS+ N-dim-split head, where it
is the group count N and a group's value is divided evenly among its members.
"""

from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from config import EXPLAINER_HIDDEN_UNITS
from errors import DomainError
from grouping import GroupPartition
from shapley import ShapleyVector, efficient_normalize

DTYPE = torch.float64

HEAD_N_DIM = "n-dim"
HEAD_PENALTY = "n-dim-penalty"
HEAD_SPLIT = "N-dim-split"


class ExplainerNet(nn.Module):

    def __init__(self, d: int, m: int, players: int, hidden_units: int = EXPLAINER_HIDDEN_UNITS):
        super().__init__()
        self.m = m
        self.players = players
        self.net = nn.Sequential(
            nn.Linear(d + m, hidden_units, dtype=DTYPE),
            nn.ReLU(),
            nn.Linear(hidden_units, players * m, dtype=DTYPE),
        )

    def forward(self, inputs: torch.Tensor) -> torch.Tensor:
        return self.net(inputs).view(-1, self.players, self.m)


@dataclass(eq=False)
class ExplainerParams:
    net: ExplainerNet
    n: int
    d: int
    m: int
    hidden_units: int
    init_seed: int
    head: str = HEAD_N_DIM
    partition: GroupPartition = None
    metadata: dict = field(default_factory=dict)
    losses: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def players(self) -> int:
        return self.net.players

    def state_arrays(self) -> dict:
        return {name: tensor.detach().numpy().copy() for name, tensor in self.net.state_dict().items()}


def init_explainer(
        n: int,
        d: int,
        m: int,
        hidden_units: int = EXPLAINER_HIDDEN_UNITS,
        seed: int = 0,
        *,
        head: str = HEAD_N_DIM,
        partition: GroupPartition = None,
        zero: bool = False,
) -> ExplainerParams:
    players = partition.N if head == HEAD_SPLIT else n
    if head == HEAD_SPLIT and partition is None:
        raise DomainError("the N-dim-split head needs a partition")
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed & ((1 << 63) - 1))
        net = ExplainerNet(d, m, players, hidden_units)
    if zero:
        with torch.no_grad():
            for parameter in net.parameters():
                parameter.zero_()
    return ExplainerParams(net, n, d, m, hidden_units, seed, head, partition)


def encode_inputs(x, y, m: int) -> torch.Tensor:
    """Features concatenated with the one-hot label, batched."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.int64))
    return torch.from_numpy(np.hstack([x, np.eye(m)[y]]))


def raw_outputs(params: ExplainerParams, x, y) -> torch.Tensor:
    """Batch x players attributions before normalization."""
    y = np.atleast_1d(np.asarray(y, dtype=np.int64))
    if y.size and (y.min() < 0 or y.max() >= params.m):
        raise DomainError(f"label out of range [0, {params.m})")
    grid = params.net(encode_inputs(x, y, params.m))
    return grid[torch.arange(grid.shape[0]), :, torch.from_numpy(y)]


def split_to_data(params: ExplainerParams, group_values: np.ndarray) -> np.ndarray:
    partition = params.partition
    return group_values[..., partition.group_of] / partition.sizes[partition.group_of]


def explainer_forward(params: ExplainerParams, x, y: int) -> np.ndarray:
    """Length-n attributions for (x, y) before efficient normalization."""
    with torch.no_grad():
        values = raw_outputs(params, x, y)[0].numpy()
    return split_to_data(params, values) if params.head == HEAD_SPLIT else values


def predict_normalized(params: ExplainerParams, x, y: int, v_one: float, v_zero: float) -> ShapleyVector:
    with torch.no_grad():
        values = raw_outputs(params, x, y)[0].numpy()
    if params.head == HEAD_SPLIT:
        # normalize the N group values, then divide each evenly among its members
        group_values = efficient_normalize(values, v_one, v_zero).values
        return ShapleyVector.certify(split_to_data(params, group_values), v_one, v_zero)
    return efficient_normalize(values, v_one, v_zero)
