"""Dyson-limit predictions and convergence of exact finite-N values toward them.

Predictions are assembled by the same block determinants as the exact
correlators, with each finite-N kernel replaced by its bulk limit written in
physical units around x. Offsets zeta, eta are measured in mean level spacings,
i.e. a physical argument is x + zeta / (N rho(x)).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from charpoly.models import EnsembleConfig, Potential, QuadratureSpec
from charpoly.utils.correlators import (
    CorrelatorKind,
    CorrelatorSpec,
    evaluate,
    formula_f1,
    formula_f2,
    formula_f4,
    formula_f5,
)
from charpoly.utils.ensemble import potential_eval
from charpoly.utils.equilibrium import (
    DensityMode,
    check_bulk,
    density_and_alpha,
    finite_density,
)
from charpoly.utils.errors import (
    CoincidentArguments,
    ConfluentOrderTooHigh,
    DomainViolation,
    InvalidCorrelatorSpec,
)
from charpoly.utils.kernels import FiniteKernels, KernelFamily, limit_kernel
from charpoly.utils.orthopoly import RecurrenceTable, build_recurrence, gamma_const
from charpoly.utils.scaled import ZERO, ScaledComplex
from charpoly.utils.vandermonde import is_coincident
from charpoly.utils.workers import map_ordered

log = logging.getLogger(__name__)

MAX_OFFSET = 5.0


@dataclass(frozen=True)
class ScalingPoint:
    x: float
    zeta: tuple[complex, ...]
    eta: tuple[complex, ...] = ()
    n: int = 100

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeta", tuple(complex(v) for v in self.zeta))
        object.__setattr__(self, "eta", tuple(complex(v) for v in self.eta))
        for offset in self.zeta + self.eta:
            if abs(offset) > MAX_OFFSET:
                raise DomainViolation(
                    f"Offset {offset} exceeds {MAX_OFFSET} mean level spacings"
                )

    def check_bulk(self, potential: Potential, table: RecurrenceTable | None = None) -> None:
        check_bulk(potential, self.x, table)

    def with_n(self, n: int) -> ScalingPoint:
        return ScalingPoint(x=self.x, zeta=self.zeta, eta=self.eta, n=n)

    def spec(self, kind: CorrelatorKind, scale: float = 1.0) -> CorrelatorSpec:
        """The correlator spec at physical arguments x + offset / scale."""

        def place(offsets: tuple[complex, ...]) -> tuple[complex, ...]:
            return tuple(self.x + o / scale for o in offsets)

        zeta, eta = place(self.zeta), place(self.eta)
        if kind == CorrelatorKind.F1:
            return CorrelatorSpec(kind=kind, lam=zeta, mu=eta)
        if kind == CorrelatorKind.F3:
            return CorrelatorSpec(kind=kind, eps=zeta, omega=eta)
        if kind == CorrelatorKind.GENERAL:
            raise InvalidCorrelatorSpec("No Dyson-limit prediction is offered for the general form")
        return CorrelatorSpec(kind=kind, eps=zeta, mu=eta)

    def offsets_spec(self, kind: CorrelatorKind) -> CorrelatorSpec:
        return ScalingPoint(x=0.0, zeta=self.zeta, eta=self.eta, n=self.n).spec(kind)


class ScalingKernels:
    """Bulk limits of W_I, W_II, W_III around x, taking offsets as arguments.

    The constants keep the exact table indices, so the predictions carry the
    same c_k and gamma_k factors as the finite-N formulas they approximate.
    """

    def __init__(self, table: RecurrenceTable, x: float, rho: float, alpha: float):
        self.table = table
        self.n_size = table.cfg.n
        self.nrho = self.n_size * rho
        self.alpha = alpha
        value, _ = potential_eval(table.cfg.potential, float(x))
        self.nv = self.n_size * value

    @staticmethod
    def _value_only(r: int, s: int) -> None:
        if r or s:
            raise ConfluentOrderTooHigh(
                "Dyson-limit kernels are evaluated at distinct offsets only"
            )

    def w1(self, n: int, lam: complex, mu: complex, r: int = 0, s: int = 0) -> ScaledComplex:
        self._value_only(r, s)
        prefactor = ScaledComplex(self.log_c2(n - 1) + math.log(self.nrho) + self.nv, 1 + 0j)
        tilt = ScaledComplex.exp(self.alpha * (lam + mu))
        return prefactor * tilt * limit_kernel(KernelFamily.I, lam, mu)

    def w2(self, n: int, eps: complex, mu: complex, r: int = 0, s: int = 0) -> ScaledComplex:
        self._value_only(r, s)
        if is_coincident(eps, mu):
            raise CoincidentArguments(f"S_II has a pole at {eps}; use the residue")
        prefactor = -(self.gamma(n - 1).inverse()) * self.nrho
        tilt = ScaledComplex.exp(-self.alpha * (eps - mu))
        return prefactor * tilt * limit_kernel(KernelFamily.II, eps, mu)

    def w3(self, n: int, eps: complex, omega: complex, r: int = 0, s: int = 0) -> ScaledComplex:
        self._value_only(r, s)
        sine = limit_kernel(KernelFamily.III, eps, omega)
        if sine == 0:
            return ZERO
        prefactor = (self.gamma(n - 1).inverse() * self.nrho).scale(-self.nv)
        tilt = ScaledComplex.exp(-self.alpha * (eps + omega))
        return prefactor * tilt * sine

    def w2_residue(self, n: int, z: complex) -> ScaledComplex:
        return self.gamma(n - 1).inverse()

    def gamma(self, k: int) -> ScaledComplex:
        return gamma_const(self.table, k)

    def log_c2(self, k: int) -> float:
        self.table.check_index(k)
        return float(self.table.log_c2[k])

    def difference(self, a: complex, b: complex) -> complex:
        return (complex(b) - complex(a)) / self.nrho


def scaling_kernels(
    potential: Potential,
    pt: ScalingPoint,
    depth: int,
    q: QuadratureSpec | None = None,
) -> ScalingKernels:
    pt.check_bulk(potential)
    cfg = EnsembleConfig(potential=potential, n=pt.n)
    rho, alpha = density_and_alpha(cfg, pt.x, DensityMode.limit)
    table = build_recurrence(cfg, max(depth, pt.n + 1), q)
    return ScalingKernels(table, pt.x, rho, alpha)


def predict_with(
    provider: ScalingKernels, kind: CorrelatorKind, pt: ScalingPoint, threads: int = 1
) -> ScaledComplex:
    spec = pt.offsets_spec(kind)
    n = provider.n_size
    if kind == CorrelatorKind.F1:
        return formula_f1(provider, n, spec.lam, spec.mu)
    if kind == CorrelatorKind.F2:
        return formula_f2(provider, n, spec.eps, spec.mu)
    if kind == CorrelatorKind.F3:
        return formula_f5(provider, n, spec.eps + spec.omega, (), threads)
    if kind == CorrelatorKind.F4:
        return formula_f4(provider, n, spec.eps, spec.mu)
    return formula_f5(provider, n, spec.eps, spec.mu, threads)


def dyson_predict(
    kind: CorrelatorKind,
    pt: ScalingPoint,
    potential: Potential,
    q: QuadratureSpec | None = None,
    threads: int = 1,
) -> ScaledComplex:
    spec = pt.offsets_spec(kind)
    provider = scaling_kernels(potential, pt, spec.required_depth(pt.n), q)
    return predict_with(provider, kind, pt, threads)


def _check_two_point(pt: ScalingPoint) -> tuple[complex, complex]:
    if len(pt.eta) != 2:
        raise DomainViolation("The two-point function takes exactly two offsets eta")
    eta1, eta2 = pt.eta
    if not eta1.imag > 0 > eta2.imag:
        raise DomainViolation(
            f"The two-point function needs Im eta_1 > 0 > Im eta_2, got {eta1}, {eta2}"
        )
    return eta1, eta2


def two_point_resolvent(pt: ScalingPoint, potential: Potential) -> complex:
    """[pi rho]^2 [1 + (alpha/pi)^2 - 2i sin(pi d) e^{-i pi d} / (pi d)^2], d = eta_2 - eta_1."""
    eta1, eta2 = _check_two_point(pt)
    pt.check_bulk(potential)
    cfg = EnsembleConfig(potential=potential, n=pt.n)
    rho, alpha = density_and_alpha(cfg, pt.x, DensityMode.limit)
    d = eta2 - eta1
    oscillation = 2j * cmath.sin(math.pi * d) * cmath.exp(-1j * math.pi * d) / (math.pi * d) ** 2
    return (math.pi * rho) ** 2 * (1 + (alpha / math.pi) ** 2 - oscillation)


def _contour_mixed_derivative(f, c1: complex, c2: complex, radius: float, points: int) -> complex:
    """d^2 f / du dv at (c1, c2) by the trapezoid rule on two circles."""
    theta = 2 * math.pi * np.arange(points) / points
    shifts = radius * np.exp(1j * theta)
    total = 0j
    for s1 in shifts:
        for s2 in shifts:
            total += f(c1 + s1, c2 + s2) / (s1 * s2)
    return total / (points * points)


def two_point_resolvent_verify(
    pt: ScalingPoint, potential: Potential, points: int = 32, q: QuadratureSpec | None = None
) -> complex:
    """rho^2 d^2/du dv of the F2 K = 2 prediction at numerator offsets u, v = eta."""
    eta1, eta2 = _check_two_point(pt)
    provider = scaling_kernels(potential, pt, pt.n + 1, q)

    def prediction(u: complex, v: complex) -> complex:
        return formula_f2(provider, pt.n, (eta1, eta2), (u, v)).to_complex()

    radius = min(0.5, abs(eta2 - eta1) / 4)
    rho = provider.nrho / pt.n
    return rho**2 * _contour_mixed_derivative(prediction, eta1, eta2, radius, points)


def two_point_resolvent_finite(
    pt: ScalingPoint,
    potential: Potential,
    points: int = 16,
    q: QuadratureSpec | None = None,
) -> complex:
    """N^{-2} d^2/dmu_1 dmu_2 of the exact F2 K = 2 at mu = eps = x + eta / (N rho_N)."""
    eta1, eta2 = _check_two_point(pt)
    cfg = EnsembleConfig(potential=potential, n=pt.n)
    table = build_recurrence(cfg, pt.n + 1, q)
    pt.check_bulk(potential, table)
    nrho = pt.n * finite_density(cfg, pt.x, table, q)
    eps = (pt.x + eta1 / nrho, pt.x + eta2 / nrho)
    provider = FiniteKernels(table, q)

    def exact(u: complex, v: complex) -> complex:
        return formula_f2(provider, pt.n, eps, (u, v)).to_complex()

    radius = min(0.5, abs(eta2 - eta1) / 4) / nrho
    return _contour_mixed_derivative(exact, eps[0], eps[1], radius, points) / pt.n**2


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    abs_err: float
    rel_err: float


@dataclass(frozen=True)
class ConvergenceStudy:
    kind: CorrelatorKind
    rows: tuple[ConvergenceRow, ...]
    order: float


def convergence_study(
    kind: CorrelatorKind,
    template: ScalingPoint,
    potential: Potential,
    n_list: list[int],
    q: QuadratureSpec | None = None,
    threads: int = 1,
    finite_scaling: bool = True,
) -> ConvergenceStudy:
    """Exact correlators at scaled arguments against the Dyson-limit prediction.

    With finite_scaling the arguments use rho = K_N(x, x)/N; the prediction
    always uses the equilibrium density.
    """
    if sorted(n_list) != list(n_list) or len(set(n_list)) != len(n_list):
        raise DomainViolation(f"N list must be strictly ascending, got {n_list}")
    template.check_bulk(potential)
    q = q if q is not None else QuadratureSpec()

    def run(n: int) -> ConvergenceRow:
        pt = template.with_n(n)
        cfg = EnsembleConfig(potential=potential, n=n)
        depth = max(pt.spec(kind, 1.0).required_depth(n), n + 1)
        table = build_recurrence(cfg, depth, q)
        if finite_scaling:
            nrho = n * finite_density(cfg, pt.x, table, q)
        else:
            nrho = n * density_and_alpha(cfg, pt.x, DensityMode.limit)[0]
        exact = evaluate(pt.spec(kind, nrho), table, q)
        predicted = dyson_predict(kind, pt, potential, q)
        rel_err = abs((exact / predicted).to_complex() - 1)
        abs_err = abs((exact - predicted).to_complex())
        log.info("N=%d: relative error %.3e against the Dyson limit", n, rel_err)
        return ConvergenceRow(n=n, abs_err=abs_err, rel_err=rel_err)

    rows = tuple(map_ordered(run, n_list, threads))
    return ConvergenceStudy(kind=kind, rows=rows, order=fitted_order(rows))


def fitted_order(rows: tuple[ConvergenceRow, ...]) -> float:
    """Minus the least-squares slope of log(rel_err) against log(N)."""
    usable = [row for row in rows if row.rel_err > 0 and math.isfinite(row.rel_err)]
    if len(usable) < 2:
        return math.nan
    slope, _ = np.polyfit(
        np.log([row.n for row in usable]), np.log([row.rel_err for row in usable]), 1
    )
    return float(-slope)

