"""Finite-N kernels and their local limits.

    W_I,n(l, m)   = [pi_n(l) pi_{n-1}(m) - pi_{n-1}(l) pi_n(m)] / (l - m)
    W_II,n(e, m)  = [h_n(e) pi_{n-1}(m) - h_{n-1}(e) pi_n(m)] / (e - m)
    W_III,n(e, w) = [h_n(e) h_{n-1}(w) - h_{n-1}(e) h_n(w)] / (e - w)

Every kernel is also available as a Taylor coefficient in both arguments,
which is what the confluent determinant rows of the correlators consume.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from charpoly.models import QuadratureSpec
from charpoly.utils.cauchy import cauchy_taylor
from charpoly.utils.ensemble import potential_eval
from charpoly.utils.errors import CoincidentArguments, DomainViolation, IndexOutOfTable
from charpoly.utils.orthopoly import RecurrenceTable, gamma_const, monic_taylor
from charpoly.utils.scaled import ScaledComplex, scaled_sum
from charpoly.utils.vandermonde import is_coincident, warn_if_near

log = logging.getLogger(__name__)

Taylor = list[ScaledComplex]


class KernelFamily(str, Enum):
    I = "I"  # noqa: E741
    II = "II"
    III = "III"


@dataclass(frozen=True)
class KernelKind:
    """A kernel family evaluated at index n + shift: W_I at N+K, W_II at N, W_III at N-K."""

    family: KernelFamily
    shift: int = 0

    def index(self, n: int) -> int:
        return n + self.shift

    def check(self, table: RecurrenceTable, n: int) -> int:
        index = self.index(n)
        _check_positive_index(index)
        table.check_index(index)
        return index


class KernelProvider(Protocol):
    """What the correlator determinants need from a kernel family."""

    def w1(self, n: int, lam: complex, mu: complex, r: int = 0, s: int = 0) -> ScaledComplex: ...

    def w2(self, n: int, eps: complex, mu: complex, r: int = 0, s: int = 0) -> ScaledComplex: ...

    def w3(self, n: int, eps: complex, omega: complex, r: int = 0, s: int = 0) -> ScaledComplex: ...

    def w2_residue(self, n: int, z: complex) -> ScaledComplex: ...

    def gamma(self, k: int) -> ScaledComplex: ...

    def log_c2(self, k: int) -> float: ...

    def difference(self, a: complex, b: complex) -> complex: ...


def divided_taylor(
    u1: Taylor, v1: Taylor, u2: Taylor, v2: Taylor, a: complex, b: complex, r: int, s: int
) -> ScaledComplex:
    """Taylor coefficient (r, s) of [u1(a) v1(b) - u2(a) v2(b)] / (a - b) for a != b."""
    d = ScaledComplex.from_complex(complex(a) - complex(b))
    terms = []
    for i in range(r + 1):
        for j in range(s + 1):
            numerator = u1[i] * v1[j] - u2[i] * v2[j]
            if numerator.is_zero():
                continue
            p, t = r - i, s - j
            coeff = (-1) ** p * math.comb(p + t, p)
            terms.append(numerator * coeff * d ** (-1 - p - t))
    return scaled_sum(terms)


def confluent_taylor(
    u1: Taylor, v1: Taylor, u2: Taylor, v2: Taylor, r: int, s: int
) -> ScaledComplex:
    """The same coefficient at a = b when the numerator vanishes on the diagonal.

    All four expansions are about the common point; u1 and u2 need order r + s + 1.
    """
    terms = []
    for t in range(s + 1):
        i, j = r + 1 + t, s - t
        terms.append(u1[i] * v1[j] - u2[i] * v2[j])
    return scaled_sum(terms)


class FiniteKernels:
    """Kernel provider backed by a recurrence table, with per-point caches of
    the pi and h Taylor expansions."""

    def __init__(self, table: RecurrenceTable, q: QuadratureSpec | None = None):
        self.table = table
        self.cfg = table.cfg
        self.q = q if q is not None else QuadratureSpec()
        self._poly: dict[tuple[complex, int], tuple[Taylor, Taylor]] = {}
        self._cauchy: dict[tuple[complex, int], tuple[Taylor, Taylor]] = {}

    def check_index(self, k: int) -> None:
        self.table.check_index(k)

    def pi_pair(self, n: int, z: complex, order: int) -> tuple[Taylor, Taylor]:
        """Taylor expansions of (pi_n, pi_{n-1}) about z."""
        key = (complex(z), n)
        cached = self._poly.get(key)
        if cached is None or len(cached[0]) <= order:
            self.table.check_index(n)
            coeffs, scale = monic_taylor(self.table, z, n + 1, order)
            cached = (
                _scaled_row(coeffs[n], scale[n]),
                _scaled_row(coeffs[n - 1], scale[n - 1]),
            )
            self._poly[key] = cached
        return cached

    def h_pair(self, n: int, z: complex, order: int) -> tuple[Taylor, Taylor]:
        """Taylor expansions of (h_n, h_{n-1}) about z."""
        key = (complex(z), n)
        cached = self._cauchy.get(key)
        if cached is None or len(cached[0]) <= order:
            values = cauchy_taylor(self.table, self.cfg, [n - 1, n], z, self.q, order)
            cached = (values[n], values[n - 1])
            self._cauchy[key] = cached
        return cached

    def w1(self, n: int, lam: complex, mu: complex, r: int = 0, s: int = 0) -> ScaledComplex:
        _check_positive_index(n)
        if is_coincident(lam, mu):
            pn, pm = self.pi_pair(n, lam, r + s + 1)
            return confluent_taylor(pn, pm, pm, pn, r, s)
        warn_if_near(lam, mu, "W_I")
        an, am = self.pi_pair(n, lam, r)
        bn, bm = self.pi_pair(n, mu, s)
        return divided_taylor(an, bm, am, bn, lam, mu, r, s)

    def w2(self, n: int, eps: complex, mu: complex, r: int = 0, s: int = 0) -> ScaledComplex:
        _check_positive_index(n)
        if is_coincident(eps, mu):
            raise CoincidentArguments(
                f"W_II,{n} has a pole at eps = mu = {eps}; use the residue"
            )
        warn_if_near(eps, mu, "W_II")
        hn, hm = self.h_pair(n, eps, r)
        bn, bm = self.pi_pair(n, mu, s)
        return divided_taylor(hn, bm, hm, bn, eps, mu, r, s)

    def w3(self, n: int, eps: complex, omega: complex, r: int = 0, s: int = 0) -> ScaledComplex:
        _check_positive_index(n)
        if is_coincident(eps, omega):
            hn, hm = self.h_pair(n, eps, r + s + 1)
            return confluent_taylor(hn, hm, hm, hn, r, s)
        warn_if_near(eps, omega, "W_III")
        an, am = self.h_pair(n, eps, r)
        bn, bm = self.h_pair(n, omega, s)
        return divided_taylor(an, bm, am, bn, eps, omega, r, s)

    def w2_residue(self, n: int, z: complex) -> ScaledComplex:
        """Residue of W_II,n(z, mu) at mu = z; equals 1/gamma_{n-1}."""
        _check_positive_index(n)
        hn, hm = self.h_pair(n, z, 0)
        pn, pm = self.pi_pair(n, z, 0)
        return -(hn[0] * pm[0] - hm[0] * pn[0])

    def gamma(self, k: int) -> ScaledComplex:
        return gamma_const(self.table, k)

    def log_c2(self, k: int) -> float:
        self.table.check_index(k)
        return float(self.table.log_c2[k])

    def difference(self, a: complex, b: complex) -> complex:
        return complex(b) - complex(a)


def _scaled_row(mantissas, log_scale: float) -> Taylor:
    return [ScaledComplex.from_complex(m, float(log_scale)) for m in mantissas]


def _check_positive_index(n: int) -> None:
    if n < 1:
        raise IndexOutOfTable(f"Kernel index must be at least 1, got {n}")


def kernel_w1(table: RecurrenceTable, n: int, lam: complex, mu: complex) -> ScaledComplex:
    return FiniteKernels(table).w1(n, lam, mu)


def kernel_w1_cd(
    table: RecurrenceTable, n: int, lam: complex, mu: complex, r: int = 0, s: int = 0
) -> ScaledComplex:
    """W_I,n through the Christoffel-Darboux sum c_{n-1}^2 sum_{l<n} pi_l pi_l / c_l^2."""
    _check_positive_index(n)
    table.check_index(n - 1)
    a, a_scale = monic_taylor(table, lam, n, r)
    b, b_scale = monic_taylor(table, mu, n, s)
    top = float(table.log_c2[n - 1])
    return scaled_sum(
        ScaledComplex.from_complex(
            a[l, r] * b[l, s],
            float(a_scale[l] + b_scale[l]) + top - float(table.log_c2[l]),
        )
        for l in range(n)  # noqa: E741
    )


def kernel_w2(
    table: RecurrenceTable,
    n: int,
    eps: complex,
    mu: complex,
    q: QuadratureSpec | None = None,
) -> ScaledComplex:
    return FiniteKernels(table, q).w2(n, eps, mu)


def kernel_w3(
    table: RecurrenceTable,
    n: int,
    eps: complex,
    omega: complex,
    q: QuadratureSpec | None = None,
) -> ScaledComplex:
    return FiniteKernels(table, q).w3(n, eps, omega)


def kernel_kn(table: RecurrenceTable, n: int, x: float, y: float) -> float:
    """K_n(x, y) = exp(-N (V(x) + V(y)) / 2) W_I,n(x, y) / c_{n-1}^2 for real x, y."""
    vx, _ = potential_eval(table.cfg.potential, float(x))
    vy, _ = potential_eval(table.cfg.potential, float(y))
    value = kernel_w1(table, n, x, y).scale(
        -0.5 * table.cfg.n * (vx + vy) - float(table.log_c2[n - 1])
    )
    return value.to_complex().real


def kernel_value(
    kind: KernelKind,
    table: RecurrenceTable,
    n: int,
    a: complex,
    b: complex,
    q: QuadratureSpec | None = None,
) -> ScaledComplex:
    index = kind.check(table, n)
    provider = FiniteKernels(table, q)
    if kind.family == KernelFamily.I:
        return provider.w1(index, a, b)
    if kind.family == KernelFamily.II:
        return provider.w2(index, a, b)
    return provider.w3(index, a, b)


def limit_kernel(kind: KernelKind | KernelFamily, zeta: complex, eta: complex) -> complex:
    """Sine-type limits of the three families in unfolded coordinates; the index shift plays no part."""
    family = kind.family if isinstance(kind, KernelKind) else kind
    zeta, eta = complex(zeta), complex(eta)
    d = zeta - eta
    if family == KernelFamily.I:
        if abs(d) < 1e-8:
            return 1.0 - (math.pi * d) ** 2 / 6.0
        return cmath.sin(math.pi * d) / (math.pi * d)
    if family == KernelFamily.II:
        if zeta.imag == 0:
            raise DomainViolation(f"S_II needs Im zeta != 0, got {zeta}")
        if d == 0:
            raise DomainViolation(f"S_II has a pole at zeta = eta = {zeta}")
        sign = 1.0 if zeta.imag > 0 else -1.0
        return cmath.exp(sign * 1j * math.pi * d) / d
    if zeta.imag == 0 or eta.imag == 0:
        raise DomainViolation(f"S_III needs both arguments off the axis, got {zeta}, {eta}")
    if zeta.imag > 0 > eta.imag:
        return 1.0 / d
    if zeta.imag < 0 < eta.imag:
        return -1.0 / d
    return 0j
