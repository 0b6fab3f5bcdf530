"""Complex numbers stored as (log-magnitude, unit phase).

Values of pi_k and h_k at large N span thousands of orders of magnitude, so
every kernel and determinant in the library passes through this representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

Number = Union[int, float, complex]


@dataclass(frozen=True)
class ScaledComplex:
    log_mag: float
    phase: complex

    @staticmethod
    def from_complex(value: Number, log_scale: float = 0.0) -> ScaledComplex:
        """The number value * exp(log_scale)."""
        magnitude = abs(value)
        if magnitude == 0 or math.isinf(log_scale) and log_scale < 0:
            return ZERO
        if not math.isfinite(magnitude):
            raise OverflowError(f"Cannot scale non-finite value {value!r}")
        return ScaledComplex(
            log_mag=math.log(magnitude) + log_scale,
            phase=complex(value) / magnitude,
        )

    @staticmethod
    def exp(log_value: complex) -> ScaledComplex:
        """exp(log_value) for a complex logarithm."""
        log_value = complex(log_value)
        return ScaledComplex(
            log_mag=log_value.real, phase=cmath.exp(1j * log_value.imag)
        )

    def is_zero(self) -> bool:
        return self.log_mag == -math.inf

    def to_complex(self) -> complex:
        if self.is_zero():
            return 0j
        with np.errstate(over="ignore"):
            return complex(np.exp(self.log_mag)) * self.phase

    def __complex__(self) -> complex:
        return self.to_complex()

    def __mul__(self, other: ScaledComplex | Number) -> ScaledComplex:
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        return ScaledComplex(
            log_mag=self.log_mag + other.log_mag, phase=self.phase * other.phase
        )

    __rmul__ = __mul__

    def inverse(self) -> ScaledComplex:
        if self.is_zero():
            raise ZeroDivisionError("inverse of a scaled zero")
        return ScaledComplex(log_mag=-self.log_mag, phase=self.phase.conjugate())

    def __truediv__(self, other: ScaledComplex | Number) -> ScaledComplex:
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> ScaledComplex:
        return ScaledComplex.from_complex(other) * self.inverse()

    def __neg__(self) -> ScaledComplex:
        return ScaledComplex(log_mag=self.log_mag, phase=-self.phase)

    def __add__(self, other: ScaledComplex | Number) -> ScaledComplex:
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return scaled_sum([self, other])

    __radd__ = __add__

    def __sub__(self, other: ScaledComplex | Number) -> ScaledComplex:
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return scaled_sum([self, -other])

    def __rsub__(self, other: Number) -> ScaledComplex:
        return ScaledComplex.from_complex(other) - self

    def __pow__(self, power: int) -> ScaledComplex:
        if power == 0:
            return ONE
        if self.is_zero():
            if power < 0:
                raise ZeroDivisionError("negative power of a scaled zero")
            return ZERO
        return ScaledComplex(
            log_mag=self.log_mag * power, phase=self.phase**power
        )

    def conjugate(self) -> ScaledComplex:
        return ScaledComplex(log_mag=self.log_mag, phase=self.phase.conjugate())

    def scale(self, log_factor: float) -> ScaledComplex:
        """Multiplies by exp(log_factor)."""
        if self.is_zero():
            return ZERO
        return ScaledComplex(log_mag=self.log_mag + log_factor, phase=self.phase)


ZERO = ScaledComplex(log_mag=-math.inf, phase=0j)
ONE = ScaledComplex(log_mag=0.0, phase=1 + 0j)


def scaled_sum(terms: Iterable[ScaledComplex]) -> ScaledComplex:
    terms = [term for term in terms if not term.is_zero()]
    if len(terms) == 0:
        return ZERO
    top = max(term.log_mag for term in terms)
    total = sum(
        (math.exp(term.log_mag - top) * term.phase for term in terms), start=0j
    )
    return ScaledComplex.from_complex(total, log_scale=top)


def scaled_product(factors: Iterable[ScaledComplex | Number]) -> ScaledComplex:
    result = ONE
    for factor in factors:
        result = result * factor
    return result


def relative_difference(a: ScaledComplex, b: ScaledComplex) -> float:
    """|a - b| / max(|a|, |b|), computed without leaving scaled form."""
    if a.is_zero() and b.is_zero():
        return 0.0
    top = max(a.log_mag, b.log_mag)
    difference = (a.scale(-top) - b.scale(-top)).to_complex()
    return abs(difference)


def split_arrays(
    values: list[list[ScaledComplex]],
) -> tuple[np.ndarray, np.ndarray]:
    """Row-major matrix of scaled entries as (log_mag, phase) arrays."""
    rows = len(values)
    cols = len(values[0]) if rows > 0 else 0
    log_mag = np.full((rows, cols), -np.inf)
    phase = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(values):
        for j, entry in enumerate(row):
            log_mag[i, j] = entry.log_mag
            phase[i, j] = entry.phase
    return log_mag, phase
