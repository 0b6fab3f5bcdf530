"""Exact finite-N correlation functions of characteristic polynomials.

Every specialised formula is a ratio det[kernel block] / (product of
Vandermondes) times a constant. The block assembly below is shared with the
Dyson-limit predictions, which swap in a different KernelProvider.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from charpoly import config
from charpoly.models import EnsembleConfig, QuadratureSpec
from charpoly.utils.cauchy import cauchy_taylor
from charpoly.utils.determinants import scaled_det
from charpoly.utils.ensemble import potential_eval
from charpoly.utils.equilibrium import check_bulk, default_density, finite_density
from charpoly.utils.errors import (
    ConfluentOrderTooHigh,
    IndexOutOfTable,
    InvalidCorrelatorSpec,
    PermutationBudgetExceeded,
)
from charpoly.utils.kernels import FiniteKernels, KernelProvider
from charpoly.utils.orthopoly import RecurrenceTable, build_recurrence, gamma_const, monic_taylor
from charpoly.utils.scaled import ONE, ZERO, ScaledComplex, scaled_product, scaled_sum
from charpoly.utils.vandermonde import ArgGroup, group_arguments, is_coincident, reduced_vandermonde
from charpoly.utils.workers import map_ordered

log = logging.getLogger(__name__)

Entry = Callable[[complex, int, complex, int], ScaledComplex]


class CorrelatorKind(str, Enum):
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"
    F4 = "f4"
    F5 = "f5"
    GENERAL = "gen"


class F1Form(str, Enum):
    kernel = "kernel"
    polynomial = "polynomial"


@dataclass(frozen=True)
class CorrelatorSpec:
    """Which average to compute and at which arguments.

    F1 uses (lam, mu); F2 (eps, mu); F3 (eps, omega) with eps standing for the
    first vector of denominators; F4, F5 and GENERAL use (eps, mu).
    """

    kind: CorrelatorKind
    mu: tuple[complex, ...] = ()
    eps: tuple[complex, ...] = ()
    lam: tuple[complex, ...] = ()
    omega: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        for name in ("mu", "eps", "lam", "omega"):
            object.__setattr__(self, name, tuple(complex(v) for v in getattr(self, name)))
        kind = self.kind
        k, m = len(self.mu), len(self.eps)
        if kind == CorrelatorKind.F1:
            self._require(len(self.lam) == k >= 1, "F1 needs |lam| = |mu| >= 1")
            self._require(m == 0 and not self.omega, "F1 takes no denominators")
        elif kind == CorrelatorKind.F2:
            self._require(m == k >= 1, "F2 needs |eps| = |mu| >= 1")
        elif kind == CorrelatorKind.F3:
            self._require(m == len(self.omega) >= 1, "F3 needs |eps| = |omega| >= 1")
            self._require(k == 0, "F3 takes no numerators")
        elif kind == CorrelatorKind.F4:
            self._require(k > m >= 1 and (k + m) % 2 == 0, "F4 needs K > M >= 1, K + M even")
        elif kind == CorrelatorKind.F5:
            self._require(m > k >= 1 and (k + m) % 2 == 0, "F5 needs M > K >= 1, K + M even")
        if kind != CorrelatorKind.F1:
            self._require(not self.lam, f"{kind.value} takes no lam arguments")
        if kind != CorrelatorKind.F3:
            self._require(not self.omega, f"{kind.value} takes no omega arguments")

    @staticmethod
    def _require(condition: bool, message: str) -> None:
        if not condition:
            raise InvalidCorrelatorSpec(message)

    def numerators(self) -> tuple[complex, ...]:
        return self.lam + self.mu

    def denominators(self) -> tuple[complex, ...]:
        return self.eps + self.omega

    def required_depth(self, n: int, form: F1Form = F1Form.kernel) -> int:
        """Smallest recurrence table depth the evaluation needs at ensemble size n."""
        k, m = len(self.mu), len(self.eps)
        if self.kind == CorrelatorKind.F1:
            return n + 2 * k if form == F1Form.polynomial else n + k + 1
        if self.kind == CorrelatorKind.F2:
            return n + 1
        if self.kind == CorrelatorKind.F3:
            return n
        if self.kind == CorrelatorKind.F4:
            return n - m + (k + m) // 2 + 1
        if self.kind == CorrelatorKind.F5:
            return n
        return max(n + k, 1)


@dataclass
class RowBlock:
    """Rows of one kernel family indexed by one argument vector."""

    entry: Entry
    groups: list[ArgGroup]
    # row group index -> column group index for cross coincidences
    cross: dict[int, int] = field(default_factory=dict)
    cross_value: Callable[[complex], ScaledComplex] | None = None


def block_ratio(
    blocks: Sequence[RowBlock],
    columns: Sequence[ArgGroup],
    difference: Callable[[complex, complex], complex],
) -> ScaledComplex:
    """det[blocks] / (reduced Vandermonde of each block and of the columns)."""
    col_index: list[tuple[int, int]] = [
        (h, s) for h, group in enumerate(columns) for s in range(group.multiplicity)
    ]
    rows: list[list[ScaledComplex]] = []
    for block in blocks:
        for g, group in enumerate(block.groups):
            if g in block.cross:
                assert block.cross_value is not None
                target = (block.cross[g], 0)
                value = block.cross_value(group.value)
                rows.append([value if c == target else ZERO for c in col_index])
                continue
            for r in range(group.multiplicity):
                rows.append(
                    [block.entry(group.value, r, columns[h].value, s) for h, s in col_index]
                )
    if len(rows) != len(col_index):
        raise InvalidCorrelatorSpec(
            f"Block determinant is {len(rows)}x{len(col_index)}, not square"
        )
    denominator = scaled_product(
        [reduced_vandermonde(block.groups, difference) for block in blocks]
        + [reduced_vandermonde(columns, difference)]
    )
    det = scaled_det(rows)
    if det.is_zero():
        return ZERO
    return det / denominator


def cross_pairs(rows: Sequence[ArgGroup], columns: Sequence[ArgGroup]) -> dict[int, int]:
    pairs: dict[int, int] = {}
    for g, row in enumerate(rows):
        for h, column in enumerate(columns):
            if not is_coincident(row.value, column.value):
                continue
            if row.multiplicity > 1 or column.multiplicity > 1:
                raise ConfluentOrderTooHigh(
                    f"Argument {row.value} coincides across vectors and within one"
                )
            if g in pairs or h in pairs.values():
                raise ConfluentOrderTooHigh(f"Argument {row.value} matches twice")
            pairs[g] = h
    return pairs


def cross_factor(
    rows: Sequence[ArgGroup],
    columns: Sequence[ArgGroup],
    pairs: dict[int, int],
    difference: Callable[[complex, complex], complex],
) -> ScaledComplex:
    """prod difference(row, column) over non-coincident pairs, with multiplicities."""
    factors = []
    for g, row in enumerate(rows):
        for h, column in enumerate(columns):
            if pairs.get(g) == h:
                continue
            factor = ScaledComplex.from_complex(difference(row.value, column.value))
            factors.append(factor ** (row.multiplicity * column.multiplicity))
    return scaled_product(factors)


def _cap_multiplicity(groups: Sequence[ArgGroup], cap: int = 2) -> None:
    for group in groups:
        if group.multiplicity > cap:
            raise ConfluentOrderTooHigh(
                f"{group.multiplicity} coincident arguments at {group.value};"
                f" at most {cap} are supported by the kernel forms"
            )


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def log_products_c2(provider: KernelProvider, n: int, k: int) -> float:
    """log C_{n,k} = -k log c_{n+k-1}^2 + sum_{l=n}^{n+k-1} log c_l^2."""
    if k == 0:
        return 0.0
    return -k * provider.log_c2(n + k - 1) + sum(provider.log_c2(l) for l in range(n, n + k))


def formula_f1(
    provider: KernelProvider, n_size: int, lam: Sequence[complex], mu: Sequence[complex]
) -> ScaledComplex:
    k = len(lam)
    n = n_size + k
    lam_groups, mu_groups = group_arguments(lam), group_arguments(mu)
    block = RowBlock(
        entry=lambda a, r, b, s: provider.w1(n, a, b, r, s),
        groups=lam_groups,
    )
    ratio = block_ratio([block], mu_groups, provider.difference)
    return ratio.scale(log_products_c2(provider, n_size, k))


def formula_f2(
    provider: KernelProvider, n_size: int, eps: Sequence[complex], mu: Sequence[complex]
) -> ScaledComplex:
    k = len(eps)
    n = n_size
    eps_groups, mu_groups = group_arguments(eps), group_arguments(mu)
    _cap_multiplicity(eps_groups)
    _cap_multiplicity(mu_groups)
    pairs = cross_pairs(eps_groups, mu_groups)
    block = RowBlock(
        entry=lambda e, r, m, s: provider.w2(n, e, m, r, s),
        groups=eps_groups,
        cross=pairs,
        cross_value=lambda z: provider.w2_residue(n, z),
    )
    constant = _sign(k * (k - 1) // 2) * provider.gamma(n - 1) ** k
    ratio = block_ratio([block], mu_groups, provider.difference)
    return constant * cross_factor(eps_groups, mu_groups, pairs, provider.difference) * ratio


def formula_f4(
    provider: KernelProvider, n_size: int, eps: Sequence[complex], mu: Sequence[complex]
) -> ScaledComplex:
    m, k = len(eps), len(mu)
    half = (k + m) // 2
    n = n_size - m + half
    mu_a, mu_b = list(mu[: half - m]), list(mu[half - m :])
    eps_groups = group_arguments(eps)
    a_groups, b_groups = group_arguments(mu_a), group_arguments(mu_b)
    for groups in (eps_groups, a_groups, b_groups):
        _cap_multiplicity(groups)
    pairs = cross_pairs(eps_groups, b_groups)
    blocks = [
        RowBlock(
            entry=lambda e, r, b, s: provider.w2(n, e, b, r, s),
            groups=eps_groups,
            cross=pairs,
            cross_value=lambda z: provider.w2_residue(n, z),
        ),
        RowBlock(entry=lambda a, r, b, s: provider.w1(n, a, b, r, s), groups=a_groups),
    ]
    constant = (_sign(m * (m - 1) // 2) * provider.gamma(n - 1) ** m).scale(
        log_products_c2(provider, n_size, half - m)
    )
    ratio = block_ratio(blocks, b_groups, provider.difference)
    return constant * cross_factor(eps_groups, b_groups, pairs, provider.difference) * ratio


def formula_f5(
    provider: KernelProvider,
    n_size: int,
    eps: Sequence[complex],
    mu: Sequence[complex],
    threads: int = 1,
) -> ScaledComplex:
    """The symmetrised block form for M > K; K = 0 gives the inverse products F3."""
    m, k = len(eps), len(mu)
    p = (m - k) // 2
    half = (m + k) // 2
    n = n_size - p
    if n < 1:
        raise IndexOutOfTable(
            f"Kernel index N - (M - K)/2 = {n} is below 1; need N > {p}"
        )
    _cap_multiplicity(group_arguments(eps))
    mu_groups = group_arguments(mu)
    _cap_multiplicity(mu_groups)
    cache: dict[tuple, ScaledComplex] = {}

    def cached(key: tuple, compute: Callable[[], ScaledComplex]) -> ScaledComplex:
        value = cache.get(key)
        if value is None:
            value = compute()
            cache[key] = value
        return value

    def w2_entry(row_mu: complex, r: int, col_eps: complex, s: int) -> ScaledComplex:
        return cached(
            ("II", row_mu, r, col_eps, s), lambda: provider.w2(n, col_eps, row_mu, s, r)
        )

    def w3_entry(row_eps: complex, r: int, col_eps: complex, s: int) -> ScaledComplex:
        return cached(
            ("III", row_eps, r, col_eps, s), lambda: provider.w3(n, row_eps, col_eps, r, s)
        )

    def residue(z: complex) -> ScaledComplex:
        return -cached(("R", z), lambda: provider.w2_residue(n, z))

    def term(order: tuple[int, ...]) -> ScaledComplex:
        permuted = [eps[i] for i in order]
        a_groups = group_arguments(permuted[:p])
        b_groups = group_arguments(permuted[p:])
        pairs = cross_pairs(mu_groups, b_groups)
        blocks = [
            RowBlock(entry=w2_entry, groups=mu_groups, cross=pairs, cross_value=residue),
            RowBlock(entry=w3_entry, groups=a_groups),
        ]
        ratio = block_ratio(blocks, b_groups, provider.difference)
        if ratio.is_zero():
            return ZERO
        return cross_factor(mu_groups, b_groups, pairs, provider.difference) * ratio

    permutations = list(itertools.permutations(range(m)))
    chunk = max(1, len(permutations) // m)
    blocks = [permutations[i : i + chunk] for i in range(0, len(permutations), chunk)]
    partials = map_ordered(lambda orders: scaled_sum(term(o) for o in orders), blocks, threads)
    total = scaled_sum(partials)
    constant = _sign(k * (k + 1) // 2 + p) * provider.gamma(n - 1) ** half
    for s in range(n, n_size):
        constant = constant * provider.gamma(s)
    log.debug("Summed %d permutation terms for M=%d K=%d", len(permutations), m, k)
    return (constant * total).scale(-math.lgamma(m + 1))


def corr_products(
    spec: CorrelatorSpec,
    table: RecurrenceTable,
    q: QuadratureSpec | None = None,
    form: F1Form = F1Form.kernel,
) -> ScaledComplex:
    _expect(spec, CorrelatorKind.F1)
    n_size = table.cfg.n
    _require_depth(table, spec.required_depth(n_size, form))
    if form == F1Form.polynomial:
        return corr_general(2 * len(spec.mu), 0, (), spec.lam + spec.mu, table, q)
    return formula_f1(FiniteKernels(table, q), n_size, spec.lam, spec.mu)


def corr_ratios(
    spec: CorrelatorSpec, table: RecurrenceTable, q: QuadratureSpec | None = None
) -> ScaledComplex:
    _expect(spec, CorrelatorKind.F2)
    _require_depth(table, spec.required_depth(table.cfg.n))
    return formula_f2(FiniteKernels(table, q), table.cfg.n, spec.eps, spec.mu)


def corr_inverse(
    spec: CorrelatorSpec,
    table: RecurrenceTable,
    q: QuadratureSpec | None = None,
    threads: int = 1,
) -> ScaledComplex:
    _expect(spec, CorrelatorKind.F3)
    k = len(spec.eps)
    if k > config.INVERSE_K_CAP:
        raise PermutationBudgetExceeded(
            f"F3 with K={k} sums {math.factorial(2 * k)} permutations;"
            f" the cap is K <= {config.INVERSE_K_CAP}"
        )
    _require_depth(table, spec.required_depth(table.cfg.n))
    args = spec.eps + spec.omega
    if any(group.multiplicity > 2 for group in group_arguments(args)):
        # higher confluence goes through the transform determinant
        return corr_general(0, len(args), args, (), table, q)
    return formula_f5(FiniteKernels(table, q), table.cfg.n, args, (), threads)


def corr_mixed_more_num(
    spec: CorrelatorSpec, table: RecurrenceTable, q: QuadratureSpec | None = None
) -> ScaledComplex:
    _expect(spec, CorrelatorKind.F4)
    _require_depth(table, spec.required_depth(table.cfg.n))
    return formula_f4(FiniteKernels(table, q), table.cfg.n, spec.eps, spec.mu)


def corr_mixed_more_den(
    spec: CorrelatorSpec,
    table: RecurrenceTable,
    q: QuadratureSpec | None = None,
    threads: int = 1,
) -> ScaledComplex:
    _expect(spec, CorrelatorKind.F5)
    m = len(spec.eps)
    if m > config.MIXED_M_CAP:
        raise PermutationBudgetExceeded(
            f"F5 with M={m} sums {math.factorial(m)} permutations;"
            f" the cap is M <= {config.MIXED_M_CAP}"
        )
    _require_depth(table, spec.required_depth(table.cfg.n))
    return formula_f5(FiniteKernels(table, q), table.cfg.n, spec.eps, spec.mu, threads)


def corr_general(
    k: int,
    m: int,
    eps: Sequence[complex],
    mu: Sequence[complex],
    table: RecurrenceTable,
    q: QuadratureSpec | None = None,
) -> ScaledComplex:
    """(-1)^{M(M-1)/2} prod gamma_j det[h_{N-M..N+K-1}(eps); pi_{N-M..N+K-1}(mu)]
    / (Delta(mu) Delta(eps)), with Taylor rows for repeated arguments."""
    if len(eps) != m or len(mu) != k:
        raise InvalidCorrelatorSpec(
            f"General formula needs {m} denominators and {k} numerators,"
            f" got {len(eps)} and {len(mu)}"
        )
    n_size = table.cfg.n
    if m > n_size:
        raise IndexOutOfTable(f"General formula needs M <= N, got M={m}, N={n_size}")
    if k + m == 0:
        return ONE
    q = q if q is not None else QuadratureSpec()
    _require_depth(table, n_size + k)
    ks = list(range(n_size - m, n_size + k))
    eps_groups, mu_groups = group_arguments(eps), group_arguments(mu)
    rows: list[list[ScaledComplex]] = []
    for group in eps_groups:
        taylor = cauchy_taylor(table, table.cfg, ks, group.value, q, group.multiplicity - 1)
        for r in range(group.multiplicity):
            rows.append([taylor[j][r] for j in ks])
    for group in mu_groups:
        coeffs, scale = monic_taylor(table, group.value, n_size + k, group.multiplicity - 1)
        for r in range(group.multiplicity):
            rows.append([ScaledComplex.from_complex(coeffs[j, r], float(scale[j])) for j in ks])
    constant = _sign(m * (m - 1) // 2) * scaled_product(
        gamma_const(table, j) for j in range(n_size - m, n_size)
    )
    det = scaled_det(rows)
    if det.is_zero():
        return ZERO
    return constant * det / (reduced_vandermonde(eps_groups) * reduced_vandermonde(mu_groups))


def evaluate(
    spec: CorrelatorSpec,
    table: RecurrenceTable,
    q: QuadratureSpec | None = None,
    threads: int = 1,
    form: F1Form = F1Form.kernel,
) -> ScaledComplex:
    if spec.kind == CorrelatorKind.F1:
        return corr_products(spec, table, q, form)
    if spec.kind == CorrelatorKind.F2:
        return corr_ratios(spec, table, q)
    if spec.kind == CorrelatorKind.F3:
        return corr_inverse(spec, table, q, threads)
    if spec.kind == CorrelatorKind.F4:
        return corr_mixed_more_num(spec, table, q)
    if spec.kind == CorrelatorKind.F5:
        return corr_mixed_more_den(spec, table, q, threads)
    return corr_general(len(spec.mu), len(spec.eps), spec.eps, spec.mu, table, q)


def evaluate_config(
    spec: CorrelatorSpec,
    cfg: EnsembleConfig,
    q: QuadratureSpec | None = None,
    threads: int = 1,
    form: F1Form = F1Form.kernel,
) -> ScaledComplex:
    """evaluate() on a table built deep enough for spec."""
    q = q if q is not None else QuadratureSpec()
    table = build_recurrence(cfg, max(spec.required_depth(cfg.n, form), cfg.n + 1), q)
    return evaluate(spec, table, q, threads, form)


def _expect(spec: CorrelatorSpec, kind: CorrelatorKind) -> None:
    if spec.kind != kind:
        raise InvalidCorrelatorSpec(f"Expected a {kind.value} spec, got {spec.kind.value}")


def _require_depth(table: RecurrenceTable, depth: int) -> None:
    if depth > table.k_max:
        raise IndexOutOfTable(
            f"Recurrence table of depth {table.k_max} is too shallow; this"
            f" correlator needs depth {depth}"
        )


@dataclass(frozen=True)
class MomentResult:
    exact: ScaledComplex
    asymptotic: ScaledComplex
    universal_ratio: float | None = None
    # i delta / (2 N rho) for negative moments
    offset: complex = 0j


def upsilon_plus(k: int) -> float:
    """prod_{l<K} l!/(l+K)!."""
    return math.exp(sum(math.lgamma(l + 1) - math.lgamma(l + k + 1) for l in range(k)))  # noqa: E741


def moment_positive(
    x: float,
    k: int,
    cfg: EnsembleConfig,
    table: RecurrenceTable | None = None,
    q: QuadratureSpec | None = None,
    rho: float | None = None,
) -> MomentResult:
    """<Z_N(x)^{2K}> against its large-N form prod c_l^2 e^{KNV} (N rho)^{K^2}
    (2 pi)^{K(K-1)} Upsilon_K^+.

    rho defaults to the equilibrium density for monomial potentials and to
    K_N(x, x)/N otherwise.
    """
    if k < 1 or k > config.INVERSE_K_CAP:
        raise ConfluentOrderTooHigh(
            f"Positive moments are implemented for 1 <= K <= {config.INVERSE_K_CAP}"
        )
    q = q if q is not None else QuadratureSpec()
    n_size = cfg.n
    if table is None:
        table = build_recurrence(cfg, n_size + 2 * k, q)
    _require_depth(table, n_size + 2 * k)
    check_bulk(cfg.potential, x, table)
    if rho is None:
        rho = default_density(cfg, x, table, q)
    point = (float(x),) * k
    exact = corr_products(
        CorrelatorSpec(CorrelatorKind.F1, lam=point, mu=point), table, q, F1Form.polynomial
    )
    value, _ = potential_eval(cfg.potential, float(x))
    log_prefactor = (
        sum(float(table.log_c2[l]) for l in range(n_size, n_size + k))  # noqa: E741
        + k * n_size * value
        + k * k * math.log(n_size * rho)
        + k * (k - 1) * math.log(2 * math.pi)
    )
    asymptotic = ScaledComplex(log_mag=log_prefactor + math.log(upsilon_plus(k)), phase=1 + 0j)
    ratio = exact.scale(-log_prefactor).to_complex().real
    log.info("Positive moment K=%d at x=%g: universal ratio %.6g", k, x, ratio)
    return MomentResult(exact=exact, asymptotic=asymptotic, universal_ratio=ratio)


def moment_negative(
    x: float,
    delta: float,
    k: int,
    cfg: EnsembleConfig,
    table: RecurrenceTable | None = None,
    q: QuadratureSpec | None = None,
    rho: float | None = None,
) -> MomentResult:
    """<Z_N(x+)^{-K} Z_N(x-)^{-K}> at x +- i delta / (2 N rho) against
    (2 pi)^K prod c_j^{-2} e^{-KNV} (N rho / delta)^{K^2}."""
    if delta <= 0:
        raise InvalidCorrelatorSpec(f"delta must be positive, got {delta}")
    if k < 1 or k > config.INVERSE_K_CAP:
        raise PermutationBudgetExceeded(
            f"Negative moments are implemented for 1 <= K <= {config.INVERSE_K_CAP}"
        )
    q = q if q is not None else QuadratureSpec()
    n_size = cfg.n
    if table is None:
        table = build_recurrence(cfg, n_size + 1, q)
    check_bulk(cfg.potential, x, table)
    if rho is None:
        rho = finite_density(cfg, x, table, q)
    offset = 1j * delta / (2 * n_size * rho)
    spec = CorrelatorSpec(CorrelatorKind.F3, eps=(x + offset,) * k, omega=(x - offset,) * k)
    exact = corr_inverse(spec, table, q)
    value, _ = potential_eval(cfg.potential, float(x))
    log_asymptotic = (
        k * math.log(2 * math.pi)
        - sum(float(table.log_c2[j]) for j in range(n_size - k, n_size))
        - k * n_size * value
        + k * k * math.log(n_size * rho / delta)
    )
    return MomentResult(
        exact=exact, asymptotic=ScaledComplex(log_asymptotic, 1 + 0j), offset=offset
    )
