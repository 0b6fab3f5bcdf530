"""Brute-force checks of the algebraic identities behind the determinant formulas.

Every check evaluates both sides independently and reports the residual next
to a rounding bound of 1e-10 * (number of terms) * (largest term).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from charpoly import config
from charpoly.utils.errors import CoincidentRoots, ConvergenceDomainViolated, SizeBudgetExceeded
from charpoly.utils.vandermonde import vandermonde
from charpoly.utils.workers import chunked, map_ordered

log = logging.getLogger(__name__)

ROOT_SEPARATION = 1e-10
ROUNDING_FACTOR = 1e-10


class Suite(str, Enum):
    lagrange = "lagrange"
    partition = "partition"
    schur = "schur"
    appendix = "appendix"
    all = "all"


SUITES = (Suite.lagrange, Suite.partition, Suite.schur, Suite.appendix)


@dataclass(frozen=True)
class RootSet:
    x: tuple[complex, ...]
    eps: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(complex(v) for v in self.x))
        object.__setattr__(self, "eps", tuple(complex(v) for v in self.eps))
        _check_distinct(self.x, "roots")
        for e in self.eps:
            for xi in self.x:
                if abs(e - xi) <= ROOT_SEPARATION:
                    raise CoincidentRoots(f"Evaluation point {e} coincides with root {xi}")

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    residual: float
    term_count: int
    term_scale: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "term_count": self.term_count,
            "term_scale": self.term_scale,
            "bound": self.bound,
            "ok": self.ok,
        }


def _check_distinct(values: Sequence[complex], what: str) -> None:
    for i, j in itertools.combinations(range(len(values)), 2):
        if abs(values[i] - values[j]) <= ROOT_SEPARATION:
            raise CoincidentRoots(
                f"{what} {i} and {j} are closer than {ROOT_SEPARATION}: {values[i]}, {values[j]}"
            )


def _result(name: str, residual: float, term_count: int, term_scale: float, extra: float = 0.0):
    bound = ROUNDING_FACTOR * max(term_count, 1) * max(term_scale, 1e-300) + extra
    result = IdentityResult(
        name=name,
        residual=float(residual),
        term_count=term_count,
        term_scale=float(term_scale),
        bound=float(bound),
    )
    log.debug("%s residual %.3g (bound %.3g)", name, result.residual, result.bound)
    return result


def permutation_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(order)
    for start in range(len(order)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = order[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def char_poly(x: Sequence[complex], z: complex) -> complex:
    return complex(np.prod([z - xi for xi in x]))


def char_poly_derivative_at_root(x: Sequence[complex], nu: int) -> complex:
    """Z'(x_nu) = prod_{j != nu} (x_nu - x_j)."""
    return complex(np.prod([x[nu] - xj for j, xj in enumerate(x) if j != nu]))


def lagrange_checks(roots: RootSet, k_range: Sequence[int] | None = None) -> IdentityResult:
    """sum x^K / Z'(x) = 0 for K <= N - 2 and eps^K / Z(eps) = sum x^K / ((eps - x) Z'(x))
    for K <= N - 1, over k_range and every evaluation point."""
    x = roots.x
    n = roots.n
    ks = list(k_range) if k_range is not None else list(range(n))
    derivatives = [char_poly_derivative_at_root(x, nu) for nu in range(n)]
    residual = 0.0
    scale = 0.0
    count = 0
    for k in ks:
        if k < 0 or k > n - 1:
            raise ValueError(f"K={k} is outside 0..{n - 1}")
        terms = [x[nu] ** k / derivatives[nu] for nu in range(n)]
        if k <= n - 2:
            residual = max(residual, abs(sum(terms)))
            scale = max(scale, max(abs(t) for t in terms))
            count += n
        for e in roots.eps:
            lhs = e**k / char_poly(x, e)
            pieces = [t / (e - xi) for t, xi in zip(terms, x)]
            residual = max(residual, abs(lhs - sum(pieces)))
            scale = max(scale, abs(lhs), max(abs(p) for p in pieces))
            count += n
    return _result("lagrange", residual, count, scale)


def partition_identity_check(m: int, roots: RootSet) -> IdentityResult:
    """prod_l eps_l^{N-M} / Z(eps_l) against the sum over M-subsets S (ascending)
    of (-1)^{M(N-M)} prod_{i in S} x_i^{N-M} / prod_{i in S, l} (eps_l - x_i)
    times Delta(x_S) Delta(x_rest) / Delta(x_S, x_rest)."""
    x = roots.x
    n = roots.n
    eps = roots.eps
    if n > config.IDENTITY_PARTITION_MAX_N:
        raise SizeBudgetExceeded(
            f"Subset enumeration is limited to N <= {config.IDENTITY_PARTITION_MAX_N}, got {n}"
        )
    if not 1 <= m <= n or len(eps) != m:
        raise ValueError(f"Need 1 <= M <= N and M evaluation points; got M={m}, N={n}, {len(eps)}")
    lhs = complex(np.prod([e ** (n - m) / char_poly(x, e) for e in eps]))
    sign = -1 if (m * (n - m)) % 2 else 1
    terms = []
    for subset in itertools.combinations(range(n), m):
        rest = [i for i in range(n) if i not in subset]
        chosen = [x[i] for i in subset]
        others = [x[i] for i in rest]
        value = np.prod([xi ** (n - m) for xi in chosen])
        value /= np.prod([e - xi for xi in chosen for e in eps])
        value *= vandermonde(chosen) * vandermonde(others) / vandermonde(chosen + others)
        terms.append(sign * complex(value))
    residual = abs(lhs - sum(terms))
    scale = max([abs(lhs)] + [abs(t) for t in terms])
    return _result(f"partition(N={n},M={m})", residual, len(terms), scale)


def partitions(total: int, max_parts: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of total into at most max_parts parts, weakly decreasing."""
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(total, largest), 0, -1):
        for rest in partitions(total - first, max_parts - 1, first):
            yield (first,) + rest


def schur_polynomial(lam: Sequence[int], x: Sequence[complex]) -> complex:
    """Bialternant det(x_i^{lam_j + N - j}) / det(x_i^{N - j})."""
    n = len(x)
    if len(lam) > n:
        return 0j
    padded = list(lam) + [0] * (n - len(lam))
    values = np.asarray(x, dtype=complex)[:, None]
    delta = np.arange(n - 1, -1, -1)
    numerator = np.linalg.det(values ** (np.asarray(padded) + delta))
    return complex(numerator / np.linalg.det(values**delta))


def geometric_tail(r: float, variables: int, cap: int) -> float:
    """sum_{d > cap} C(d + V - 1, V - 1) r^d, the size of the degree > cap part of
    prod (1 - x_i y_j)^{-1} when every |x_i y_j| <= r."""
    if r == 0:
        return 0.0
    tail = 0.0
    d = cap + 1
    while True:
        log_term = (
            math.lgamma(d + variables) - math.lgamma(d + 1) - math.lgamma(variables) + d * math.log(r)
        )
        term = math.exp(log_term)
        tail += term
        if d > cap + 10 and term < 1e-18 * max(tail, 1e-300):
            return tail
        d += 1


def schur_expansion_check(
    x: Sequence[complex], y: Sequence[complex], degree_cap: int
) -> IdentityResult:
    x = [complex(v) for v in x]
    y = [complex(v) for v in y]
    _check_distinct(x, "x values")
    _check_distinct(y, "y values")
    r = max(abs(xi * yj) for xi in x for yj in y)
    if r > config.SCHUR_MAX_PRODUCT:
        raise ConvergenceDomainViolated(
            f"max |x_i y_j| = {r:.3g} exceeds {config.SCHUR_MAX_PRODUCT}; the Cauchy"
            " expansion would converge too slowly to bound"
        )
    product = complex(np.prod([1.0 / (1.0 - xi * yj) for xi in x for yj in y]))
    parts = min(len(x), len(y))
    total = 0j
    scale = abs(product)
    count = 0
    for d in range(degree_cap + 1):
        for lam in partitions(d, parts):
            term = schur_polynomial(lam, x) * schur_polynomial(lam, y)
            total += term
            scale = max(scale, abs(term))
            count += 1
    tail = geometric_tail(r, len(x) * len(y), degree_cap)
    return _result(
        f"schur(N={len(x)},M={len(y)},cap={degree_cap})",
        abs(product - total),
        count,
        scale,
        extra=tail,
    )


def _raw_double_sum(f: np.ndarray, g: np.ndarray, n: int, m: int, threads: int) -> complex:
    size = n + m
    perms = list(itertools.permutations(range(size)))
    signs = {p: permutation_sign(p) for p in perms}

    def partial(block: list[tuple[int, ...]]) -> complex:
        total = 0j
        for sigma in block:
            f_part = np.prod([f[sigma[j], j] for j in range(m)])
            for pi in perms:
                if any(sigma[i] != pi[i] for i in range(m, size)):
                    continue
                g_part = np.prod([g[pi[j], j] for j in range(m)])
                total += signs[sigma] * signs[pi] * f_part * g_part
        return complex(total)

    blocks = chunked(perms, max(1, len(perms) // size))
    return sum(map_ordered(partial, blocks, threads), 0j)


def _ordered_subsets(f: np.ndarray, g: np.ndarray, n: int, m: int) -> complex:
    total = 0j
    for subset in itertools.combinations(range(n + m), m):
        rows = list(subset)
        total += np.linalg.det(f[rows, :]) * np.linalg.det(g[rows, :])
    return math.factorial(n) * complex(total)


def _summed_kernel_det(f: np.ndarray, g: np.ndarray, n: int) -> complex:
    return math.factorial(n) * complex(np.linalg.det(f.T @ g))


def appendix_routes(f, g, n: int, m: int, threads: int = 1) -> tuple[complex, complex, complex]:
    """The double permutation sum three ways; f[k, j] = f_k(phi_j), g[k, j] = g_k(psi_j)."""
    if n + m > config.IDENTITY_APPENDIX_MAX:
        raise SizeBudgetExceeded(
            f"The double permutation sum is limited to n + m <= {config.IDENTITY_APPENDIX_MAX}"
        )
    if m < 1 or n < 0:
        raise ValueError(f"Need n >= 0 and m >= 1, got n={n}, m={m}")
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != (n + m, m) or g.shape != (n + m, m):
        raise ValueError(f"Tables must have shape {(n + m, m)}, got {f.shape} and {g.shape}")
    return (
        _raw_double_sum(f, g, n, m, threads),
        _ordered_subsets(f, g, n, m),
        _summed_kernel_det(f, g, n),
    )


def appendix_sum_check(f, g, n: int, m: int, threads: int = 1) -> IdentityResult:
    routes = appendix_routes(f, g, n, m, threads)
    residual = max(abs(a - b) for a, b in itertools.combinations(routes, 2))
    f_max = float(np.max(np.abs(f))) if np.size(f) else 0.0
    g_max = float(np.max(np.abs(g))) if np.size(g) else 0.0
    term_count = math.factorial(n + m) ** 2
    scale = max((f_max * g_max) ** m, max(abs(r) for r in routes))
    return _result(f"appendix(n={n},m={m})", residual, term_count, scale)


def _evaluation_points(rng: np.random.Generator, count: int) -> tuple[complex, ...]:
    re = rng.uniform(-1.0, 1.0, count)
    im = rng.uniform(0.3, 1.0, count) * rng.choice([-1.0, 1.0], count)
    return tuple(complex(a, b) for a, b in zip(re, im))


def run_suite(
    name: str | Suite, seed: int = config.DEFAULT_SEED, threads: int = 1
) -> list[IdentityResult]:
    try:
        suite = Suite(name)
    except ValueError:
        raise ValueError(
            f"Unknown identity suite {name!r}; choose from lagrange, partition, schur, appendix, all"
        ) from None
    if suite == Suite.all:
        return [r for part in SUITES for r in run_suite(part, seed, threads)]
    rng = np.random.default_rng(seed)
    results: list[IdentityResult] = []
    if suite == Suite.lagrange:
        results.append(lagrange_checks(RootSet(x=(0.0, 1.0, 2.0)), [0]))
        roots = RootSet(x=tuple(rng.normal(size=6)), eps=(1 + 1j,) + _evaluation_points(rng, 2))
        results.append(lagrange_checks(roots))
    elif suite == Suite.partition:
        for n in (2, 5, 8):
            for m in range(1, min(3, n) + 1):
                roots = RootSet(x=tuple(rng.uniform(-1.0, 1.0, n)), eps=_evaluation_points(rng, m))
                results.append(partition_identity_check(m, roots))
    elif suite == Suite.schur:
        for n, m in ((1, 1), (2, 2), (3, 2)):
            x = rng.uniform(-0.7, 0.7, n)
            y = rng.uniform(-0.7, 0.7, m)
            results.append(schur_expansion_check(x, y, 12))
    elif suite == Suite.appendix:
        for n, m in ((0, 1), (1, 1), (2, 2), (3, 2), (1, 4)):
            f = rng.normal(size=(n + m, m))
            g = rng.normal(size=(n + m, m))
            results.append(appendix_sum_check(f, g, n, m, threads))
    failed = [r.name for r in results if not r.ok]
    if failed:
        log.warning("Identity suite %s: residual above bound for %s", suite.value, ", ".join(failed))
    else:
        log.info("Identity suite %s: %d checks within bounds", suite.value, len(results))
    return results
