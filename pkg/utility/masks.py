from dataclasses import dataclass, field

import numpy as np

from errors import MaskError


@dataclass(frozen=True, eq=False)
class SubsetMask:
    """Binary coalition indicator over n players; player i is bit 1 << i of to_int()."""

    bits: np.ndarray
    popcount: int = field(init=False)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool).reshape(-1)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "popcount", int(bits.sum()))

    @classmethod
    def from_int(cls, value: int, n: int) -> "SubsetMask":
        if not 0 <= value < (1 << n):
            raise MaskError(f"mask integer {value} out of range for {n} players")
        return cls((value >> np.arange(n)) & 1)

    @classmethod
    def zeros(cls, n: int) -> "SubsetMask":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def ones(cls, n: int) -> "SubsetMask":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def unit(cls, i: int, n: int) -> "SubsetMask":
        bits = np.zeros(n, dtype=bool)
        bits[i] = True
        return cls(bits)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    def to_int(self) -> int:
        return int(np.sum(self.bits.astype(np.int64) << np.arange(self.n, dtype=np.int64)))

    def key(self) -> bytes:
        return np.packbits(self.bits).tobytes() + self.n.to_bytes(4, "little")

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def with_player(self, i: int) -> "SubsetMask":
        bits = self.bits.copy()
        bits[i] = True
        return SubsetMask(bits)

    def without_player(self, i: int) -> "SubsetMask":
        bits = self.bits.copy()
        bits[i] = False
        return SubsetMask(bits)

    def __eq__(self, other):
        return isinstance(other, SubsetMask) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.key())

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"SubsetMask({''.join('1' if b else '0' for b in self.bits)})"


def as_mask(mask, n: int = None) -> SubsetMask:
    if not isinstance(mask, SubsetMask):
        mask = SubsetMask(np.asarray(mask))
    if n is not None and mask.n != n:
        raise MaskError(f"mask has length {mask.n}, game has {n} players")
    return mask
