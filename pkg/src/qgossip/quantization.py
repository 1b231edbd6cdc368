"""Uniform quantizer and exact state-vector arithmetic.

Node states are stored as integer counts of the quantization step: unit k at
node i means x_i = u_min + k*delta. Keeping integers (and Fractions for means
and the quadratic potential) makes conservation checks bit-exact; floating
point never enters the dynamics.
"""

from __future__ import annotations

import json
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass(frozen=True)
class QuantizerSpec:
    """Uniform quantizer with 2**r levels spanning [u_min, u_max).

    Levels sit at u_min + k*delta for k = 0..L-1 where delta is the step
    (u_max - u_min) / 2**r; the top of the range, u_max, is delta above the
    last level.
    """

    u_min: float
    u_max: float
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("bits per sample must be >= 1")
        if not self.u_max > self.u_min:
            raise ValueError("u_max must exceed u_min")

    @property
    def levels(self) -> int:
        return 2 ** self.r

    @property
    def delta(self) -> float:
        return (self.u_max - self.u_min) / self.levels

    def level_value(self, index: int) -> float:
        if not 0 <= index < self.levels:
            raise ValueError(f"level index {index} out of range")
        return self.u_min + index * self.delta

    def unit_value(self, units: int | Fraction) -> float:
        """Real value of a state expressed in integer (or fractional) step units."""
        return self.u_min + float(units) * self.delta


def quantize_index(u: float, spec: QuantizerSpec) -> int:
    """Index of the level whose half-open cell [level, level+delta) contains u.

    The top boundary u == u_max maps to the last level so the quantizer is
    total on [u_min, u_max].
    """
    if not spec.u_min <= u <= spec.u_max:
        raise ValueError(f"value {u} outside quantizer range [{spec.u_min}, {spec.u_max}]")
    idx = int((u - spec.u_min) / spec.delta)
    # guard the float division against landing one cell high or low
    idx = min(max(idx, 0), spec.levels - 1)
    if idx + 1 < spec.levels and u >= spec.level_value(idx + 1):
        idx += 1
    elif u < spec.level_value(idx):
        idx -= 1
    return idx


def quantize(u: float, spec: QuantizerSpec) -> float:
    return spec.level_value(quantize_index(u, spec))


@dataclass
class QState:
    """Network state as integer step units, owned by one trial at a time."""

    units: list[int]
    spec: QuantizerSpec

    def __post_init__(self):
        try:
            self.units = [operator.index(k) for k in self.units]
        except TypeError:
            raise ValueError(f"state units must be integers, got {list(self.units)!r}")
        if not self.units:
            raise ValueError("state must have at least one node")
        top = self.spec.levels
        for k in self.units:
            if not 0 <= k <= top:
                raise ValueError(f"unit {k} outside [0, {top}]")

    @property
    def n(self) -> int:
        return len(self.units)

    def copy(self) -> "QState":
        return QState(list(self.units), self.spec)

    def values(self) -> list[float]:
        return [self.spec.unit_value(k) for k in self.units]


def state_from_values(values: Iterable[float], spec: QuantizerSpec) -> QState:
    """Build a state from real values, which must be exact multiples of delta."""
    units = []
    for v in values:
        k = round((v - spec.u_min) / spec.delta)
        if abs(spec.unit_value(k) - v) > 1e-9 * max(1.0, abs(v)):
            raise ValueError(f"value {v} is not a multiple of the step {spec.delta}")
        units.append(int(k))
    return QState(units, spec)


def mean_units(x: QState) -> Fraction:
    """Exact mean of the state in step units."""
    return Fraction(sum(x.units), x.n)


def state_mean(x: QState) -> float:
    """Mean of the state as a real value (u_min offset and delta applied)."""
    return x.spec.unit_value(mean_units(x))


def lyapunov_units(x: QState, alpha: Fraction | int) -> Fraction:
    """Sum of squared deviations from alpha, in squared step units, exactly."""
    a = Fraction(alpha)
    return sum((Fraction(k) - a) ** 2 for k in x.units)


def lyapunov(x: QState, alpha: Fraction | int) -> float:
    return float(lyapunov_units(x, alpha)) * x.spec.delta ** 2


def lyapunov_scaled(units: Sequence[int]) -> int:
    """n * V_mean in squared step units, as an exact integer.

    Equals n*sum(k^2) - (sum k)^2, so the mean never has to be formed; dividing
    by n recovers the potential about the mean.
    """
    s = sum(units)
    return len(units) * sum(k * k for k in units) - s * s


def spread(x: QState) -> int:
    """Range of the state in step units (max minus min)."""
    return max(x.units) - min(x.units)


def distribution(x: QState) -> list[tuple[int, int]]:
    """Distinct unit values with multiplicities, sorted by value."""
    counts: dict[int, int] = {}
    for k in x.units:
        counts[k] = counts.get(k, 0) + 1
    return sorted(counts.items())


def state_to_json(x: QState) -> str:
    """Serialize as a spec header plus the integer units."""
    payload = {
        "u_min": x.spec.u_min,
        "u_max": x.spec.u_max,
        "r": x.spec.r,
        "units": list(x.units),
    }
    return json.dumps(payload)


def state_from_json(text: str) -> QState:
    payload = json.loads(text)
    spec = QuantizerSpec(payload["u_min"], payload["u_max"], payload["r"])
    return QState(payload["units"], spec)
