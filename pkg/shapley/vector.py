from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ShapleyVector:
    values: np.ndarray
    efficiency_gap: float
    v_one: float = None
    v_zero: float = None

    @classmethod
    def certify(cls, values, v_one: float, v_zero: float) -> "ShapleyVector":
        """Wraps values with |sum(values) - (v(1) - v(0))|."""
        values = np.asarray(values, dtype=np.float64)
        gap = abs(float(values.sum()) - (v_one - v_zero))
        return cls(values, gap, float(v_one), float(v_zero))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __len__(self):
        return self.n

    def to_json(self) -> dict:
        return {
            "values": self.values.tolist(),
            "efficiencyGap": self.efficiency_gap,
            "vOne": self.v_one,
            "vZero": self.v_zero,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ShapleyVector":
        return cls(np.asarray(payload["values"], dtype=np.float64), payload["efficiencyGap"],
                   payload.get("vOne"), payload.get("vZero"))


def efficient_normalize(phi_hat, v_one: float, v_zero: float) -> ShapleyVector:
    """Additive efficient normalization: shift every coordinate by (v(1) - v(0) - sum) / n."""
    phi_hat = np.asarray(phi_hat, dtype=np.float64)
    n = phi_hat.shape[0]
    if n == 1:
        return ShapleyVector.certify(np.array([v_one - v_zero]), v_one, v_zero)
    shift = (v_one - v_zero - phi_hat.sum()) / n
    return ShapleyVector.certify(phi_hat + shift, v_one, v_zero)
