"""Equilibrium measures of V(x) = t x^{2m}, densities of states and the tilt alpha(x).

Integrals against psi run in the variable x = a sin(theta), which turns the
square-root endpoints into a smooth periodic integrand.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from charpoly import config
from charpoly.models import EnsembleConfig, Potential, QuadratureSpec
from charpoly.utils.ensemble import potential_eval
from charpoly.utils.errors import DomainViolation, OutsideSupport, UnsupportedPotential
from charpoly.utils.kernels import kernel_kn
from charpoly.utils.orthopoly import RecurrenceTable, build_recurrence
from charpoly.utils.quadrature import gauss_legendre

log = logging.getLogger(__name__)

_THETA_NODES = 128


class DensityMode(str, Enum):
    finite_n = "finite_n"
    limit = "limit"


def _kappa(j: int) -> float:
    """prod_{l=1}^{j} (2l - 1) / (2l)."""
    return math.prod((2 * l - 1) / (2 * l) for l in range(1, j + 1))  # noqa: E741


@dataclass(frozen=True)
class EquilibriumMeasure:
    m: int
    t: float
    a: float

    def potential(self) -> Potential:
        coeffs = [0.0] * (2 * self.m)
        coeffs[-1] = self.t
        return Potential(coeffs=tuple(coeffs))

    def h1(self, x):
        x = np.asarray(x, dtype=float)
        return sum(
            x ** (2 * self.m - 2 - 2 * j) * self.a ** (2 * j) * _kappa(j)
            for j in range(self.m)
        )

    def psi(self, x):
        """Density on (-a, a), zero outside."""
        x = np.asarray(x, dtype=float)
        inside = np.clip(self.a * self.a - x * x, 0.0, None)
        value = self.m * self.t / math.pi * np.sqrt(inside) * self.h1(x)
        return value if value.ndim else float(value)

    def theta_rule(self, lo: float = -math.pi / 2, hi: float = math.pi / 2, n: int = _THETA_NODES):
        """Nodes x = a sin(theta) and weights of dx on [a sin(lo), a sin(hi)]."""
        nodes, weights = gauss_legendre(n)
        half = 0.5 * (hi - lo)
        theta = lo + half * (nodes + 1.0)
        return self.a * np.sin(theta), weights * half * self.a * np.cos(theta)


def equilibrium_monomial(m: int, t: float = 1.0) -> EquilibriumMeasure:
    if m < 1:
        raise UnsupportedPotential(f"Monomial exponent must be at least 1, got m={m}")
    if not t > 0:
        raise UnsupportedPotential(f"Monomial scale must be positive, got t={t}")
    return _equilibrium_cached(m, float(t))


@lru_cache(maxsize=64)
def _equilibrium_cached(m: int, t: float) -> EquilibriumMeasure:
    a = (m * t * _kappa(m)) ** (-1.0 / (2 * m))
    log.debug("Equilibrium measure m=%d t=%g has endpoint a=%.15g", m, t, a)
    return EquilibriumMeasure(m=m, t=t, a=a)


def measure_for(potential: Potential) -> EquilibriumMeasure:
    monomial = potential.monomial()
    if monomial is None:
        raise UnsupportedPotential(
            f"Closed-form equilibrium measures need V = t x^(2m); got {potential.to_str()}"
        )
    m, t = monomial
    return equilibrium_monomial(m, t)


def normalization(meas: EquilibriumMeasure) -> float:
    return moment(meas, 0)


def moment(meas: EquilibriumMeasure, p: int) -> float:
    x, w = meas.theta_rule()
    return float(np.sum(w * x**p * meas.psi(x)))


def hilbert_transform(meas: EquilibriumMeasure, x: float) -> float:
    """(1/pi) PV int psi(s) / (x - s) ds for |x| < a, by singularity subtraction."""
    if abs(x) >= meas.a:
        raise OutsideSupport(f"x={x} is outside the support (-{meas.a}, {meas.a})")
    psi_x = meas.psi(x)
    split = math.asin(x / meas.a)
    total = 0.0
    for lo, hi in ((-math.pi / 2, split), (split, math.pi / 2)):
        s, w = meas.theta_rule(lo, hi, _THETA_NODES // 2)
        total += float(np.sum(w * (meas.psi(s) - psi_x) / (x - s)))
    total += psi_x * math.log((x + meas.a) / (meas.a - x))
    return total / math.pi


def euler_lagrange_residual(meas: EquilibriumMeasure, potential: Potential, grid) -> float:
    """max |H psi(x) - V'(x) / (2 pi)| over grid points inside the support."""
    residual = 0.0
    for x in np.atleast_1d(np.asarray(grid, dtype=float)):
        _, derivative = potential_eval(potential, float(x))
        residual = max(residual, abs(hilbert_transform(meas, float(x)) - derivative / (2 * math.pi)))
    return residual


def _log_potential_derivative(meas: EquilibriumMeasure, t: float) -> float:
    """int psi(y) / (t - y) dy for |t| >= a."""
    y, w = meas.theta_rule(n=4 * _THETA_NODES)
    return float(np.sum(w * meas.psi(y) / (t - y)))


def effective_potential_gap(meas: EquilibriumMeasure, potential: Potential, x: float) -> float:
    """F(x) - F(+-a) for F = V - 2 int log|. - y| psi(y) dy and |x| > a."""
    if abs(x) <= meas.a:
        raise DomainViolation(f"x={x} must lie outside the support [-{meas.a}, {meas.a}]")
    edge = math.copysign(meas.a, x)
    nodes, weights = gauss_legendre(64)
    u = 0.5 * (nodes + 1.0)
    total = 0.0
    for ui, wi in zip(u, weights):
        t = edge + (x - edge) * ui * ui
        _, derivative = potential_eval(potential, t)
        slope = derivative - 2.0 * _log_potential_derivative(meas, t)
        total += 0.5 * wi * slope * 2.0 * (x - edge) * ui
    return total


def finite_density(
    cfg: EnsembleConfig,
    x: float,
    table: RecurrenceTable | None = None,
    q: QuadratureSpec | None = None,
) -> float:
    """K_N(x, x) / N."""
    if table is None:
        table = build_recurrence(cfg, cfg.n + 1, q)
    return kernel_kn(table, cfg.n, x, x) / cfg.n


def density_and_alpha(
    cfg: EnsembleConfig,
    x: float,
    mode: DensityMode = DensityMode.finite_n,
    table: RecurrenceTable | None = None,
    q: QuadratureSpec | None = None,
) -> tuple[float, float]:
    if mode == DensityMode.limit:
        meas = measure_for(cfg.potential)
        if abs(x) >= meas.a:
            raise OutsideSupport(f"x={x} is outside the support (-{meas.a}, {meas.a})")
        rho = float(meas.psi(x))
    else:
        rho = finite_density(cfg, x, table, q)
    _, derivative = potential_eval(cfg.potential, float(x))
    return rho, derivative / (2.0 * rho)


def resolvent_limit(cfg: EnsembleConfig, x: float) -> complex:
    """R(x) = i pi N rho(x) - N V'(x) / 2 with the equilibrium density."""
    rho, _ = density_and_alpha(cfg, x, DensityMode.limit)
    _, derivative = potential_eval(cfg.potential, float(x))
    return complex(-0.5 * cfg.n * derivative, math.pi * cfg.n * rho)


def resolvent_inversions(resolvent: complex) -> tuple[float, float]:
    """(N rho, alpha) read back from R."""
    return resolvent.imag / math.pi, -math.pi * resolvent.real / resolvent.imag


def default_density(
    cfg: EnsembleConfig,
    x: float,
    table: RecurrenceTable | None = None,
    q: QuadratureSpec | None = None,
) -> float:
    """Equilibrium density for monomial potentials, K_N(x, x)/N otherwise."""
    if cfg.potential.monomial() is not None:
        return density_and_alpha(cfg, x, DensityMode.limit)[0]
    return finite_density(cfg, x, table, q)


def check_bulk(potential: Potential, x: float, table: RecurrenceTable | None = None) -> None:
    """Refuses x outside |x| < BULK_FRACTION * a.

    a is the equilibrium endpoint for t x^(2m) and the table's support scale for
    other potentials; with neither available there is nothing to check against.
    """
    if potential.monomial() is not None:
        edge = measure_for(potential).a
    elif table is not None:
        edge = table.support_scale()
    else:
        return
    if abs(x) >= config.BULK_FRACTION * edge:
        raise OutsideSupport(
            f"x={x} is outside the bulk |x| < {config.BULK_FRACTION:g} * {edge:.6g}"
        )
