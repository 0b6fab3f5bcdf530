from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

from charpoly import config


class Potential(BaseModel):
    """Polynomial potential V(x) = sum_j coeffs[j-1] * x**j (no constant term)."""

    model_config = ConfigDict(frozen=True)

    coeffs: tuple[float, ...]

    @field_validator("coeffs")
    @classmethod
    def confining(cls, coeffs: tuple[float, ...]) -> tuple[float, ...]:
        if len(coeffs) < 2:
            raise ValueError("potential degree must be at least 2")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("potential coefficients must be finite")
        if len(coeffs) % 2 != 0:
            raise ValueError("potential degree must be even")
        if coeffs[-1] <= 0:
            raise ValueError("leading coefficient must be positive")
        return coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @staticmethod
    def from_str(text: str) -> Potential:
        parts = [part.strip() for part in text.split(",") if part.strip() != ""]
        try:
            coeffs = tuple(float(part) for part in parts)
        except ValueError as ex:
            raise ValueError(f"Invalid potential coefficients {text!r}") from ex
        return Potential(coeffs=coeffs)

    def to_str(self) -> str:
        return ",".join(repr(c) for c in self.coeffs)

    def is_even(self) -> bool:
        # coeffs[0] multiplies x**1
        return all(c == 0 for c in self.coeffs[0::2])

    def monomial(self) -> tuple[int, float] | None:
        """Returns (m, t) when V(x) = t * x**(2m), None otherwise."""
        if any(c != 0 for c in self.coeffs[:-1]):
            return None
        return self.degree // 2, self.coeffs[-1]


class EnsembleConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    potential: Potential
    n: int = Field(..., ge=1)


class QuadratureSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol: float = Field(config.QUADRATURE_TOL, gt=0, lt=1)
    log_floor: float = Field(config.QUADRATURE_LOG_FLOOR, le=0)
    max_panels: int = Field(config.QUADRATURE_MAX_PANELS, ge=1)
    nodes_per_panel: int = Field(config.QUADRATURE_NODES_PER_PANEL, ge=2)


GAUSSIAN = Potential(coeffs=(0.0, 0.5))
