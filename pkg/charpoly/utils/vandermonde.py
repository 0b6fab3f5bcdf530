from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from charpoly import config
from charpoly.utils.scaled import ONE, ScaledComplex, scaled_product

log = logging.getLogger(__name__)


def is_coincident(a: complex, b: complex) -> bool:
    return abs(a - b) < config.COINCIDENCE_RTOL * (1.0 + abs(a))


def warn_if_near(a: complex, b: complex, what: str) -> None:
    distance = abs(a - b)
    if (
        config.COINCIDENCE_RTOL * (1.0 + abs(a))
        <= distance
        < config.COINCIDENCE_WARN_RTOL * (1.0 + abs(a))
    ):
        log.warning(
            "%s arguments %s and %s are %.2e apart; the divided difference"
            " loses about %.0f digits",
            what,
            a,
            b,
            distance,
            -_log10(distance),
        )


def _log10(value: float) -> float:
    return math.log10(value) if value > 0 else float("inf")


def vandermonde(values: Sequence[complex]) -> complex:
    """prod_{i<j} (x_j - x_i)."""
    result = 1 + 0j
    for j in range(len(values)):
        for i in range(j):
            result *= values[j] - values[i]
    return result


@dataclass
class ArgGroup:
    value: complex
    positions: list[int] = field(default_factory=list)

    @property
    def multiplicity(self) -> int:
        return len(self.positions)


def group_arguments(values: Sequence[complex]) -> list[ArgGroup]:
    """Groups coincident values, ordered by first appearance."""
    groups: list[ArgGroup] = []
    for position, value in enumerate(values):
        for group in groups:
            if is_coincident(group.value, value):
                group.positions.append(position)
                break
        else:
            groups.append(ArgGroup(value=complex(value), positions=[position]))
    return groups


def reduced_vandermonde(
    groups: Sequence[ArgGroup],
    difference: Callable[[complex, complex], complex] = lambda a, b: b - a,
) -> ScaledComplex:
    """prod_{g<h} difference(z_g, z_h)^(m_g m_h): the Vandermonde left once
    coincident rows have been replaced by Taylor rows."""
    factors = []
    for h in range(len(groups)):
        for g in range(h):
            factor = ScaledComplex.from_complex(
                difference(groups[g].value, groups[h].value)
            )
            factors.append(factor ** (groups[g].multiplicity * groups[h].multiplicity))
    if not factors:
        return ONE
    return scaled_product(factors)
