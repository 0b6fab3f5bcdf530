"""Monic orthogonal polynomials for the weight exp(-N V(x)).

The family is stored as three-term recurrence coefficients
pi_{k+1}(x) = (x - a_k) pi_k(x) - b_k pi_{k-1}(x), built by a discretized
Stieltjes (Lanczos) procedure on composite Gauss-Legendre panels.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from charpoly import config
from charpoly.models import EnsembleConfig, QuadratureSpec
from charpoly.utils.ensemble import log_weight, truncation_radius
from charpoly.utils.errors import IndexOutOfTable, LostPositivity, NonConvergedQuadrature
from charpoly.utils.quadrature import panel_nodes, uniform_edges
from charpoly.utils.scaled import ScaledComplex

log = logging.getLogger(__name__)

_RESCALE_HIGH = 1e150
_RESCALE_LOW = 1e-150


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    cfg: EnsembleConfig
    a: np.ndarray  # a_0 .. a_{k_max-1}
    b: np.ndarray  # b_0 (unused, 0) .. b_{k_max-1}
    log_c2: np.ndarray  # log c_k^2
    k_max: int
    truncation: float
    panels: int

    def check_index(self, k: int) -> None:
        if k < 0 or k >= self.k_max:
            raise IndexOutOfTable(
                f"Index {k} outside recurrence table of depth {self.k_max}"
            )

    def support_scale(self) -> float:
        """Rough half-width of the region where pi_{k_max-1} oscillates."""
        return float(np.max(np.abs(self.a) + 2.0 * np.sqrt(self.b)))

    def to_rows(self) -> list[tuple[int, float, float, float]]:
        return [
            (k, float(self.a[k]), float(self.b[k]), float(self.log_c2[k]))
            for k in range(self.k_max)
        ]


def build_recurrence(
    cfg: EnsembleConfig, k_max: int, q: QuadratureSpec | None = None
) -> RecurrenceTable:
    if k_max < 1:
        raise IndexOutOfTable("Recurrence table depth must be at least 1")
    if q is None:
        q = QuadratureSpec()
    return _build_recurrence_cached(cfg, k_max, q)


@lru_cache(maxsize=32)
def _build_recurrence_cached(
    cfg: EnsembleConfig, k_max: int, q: QuadratureSpec
) -> RecurrenceTable:
    truncation = truncation_radius(cfg, q, k_max)
    panels = max(
        config.QUADRATURE_INITIAL_PANELS,
        math.ceil(2 * (k_max + 1) / q.nodes_per_panel),
    )
    threshold = max(q.tol, 1e3 * np.finfo(float).eps)
    previous: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    while panels <= q.max_panels:
        nodes, gl_weights = panel_nodes(
            uniform_edges(-truncation, truncation, panels), q.nodes_per_panel
        )
        current = _lanczos(cfg, nodes, gl_weights, k_max, truncation)
        if previous is not None and _change(previous, current) <= threshold:
            a, b, log_c2 = current
            if cfg.potential.is_even():
                a = np.zeros_like(a)
            log.info(
                "Built recurrence table N=%d k_max=%d with %d panels on [-%.4g, %.4g]",
                cfg.n,
                k_max,
                panels,
                truncation,
                truncation,
            )
            return RecurrenceTable(
                cfg=cfg,
                a=a,
                b=b,
                log_c2=log_c2,
                k_max=k_max,
                truncation=truncation,
                panels=panels,
            )
        previous = current
        panels *= 2
    raise NonConvergedQuadrature(
        f"Recurrence coefficients did not settle within {q.max_panels} panels"
        f" (N={cfg.n}, k_max={k_max})"
    )


def _lanczos(
    cfg: EnsembleConfig,
    nodes: np.ndarray,
    gl_weights: np.ndarray,
    k_max: int,
    truncation: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    logs = log_weight(cfg, nodes)
    top = float(np.max(logs))
    weights = gl_weights * np.exp(logs - top)
    total = float(np.sum(weights))
    log_c2_0 = top + math.log(total)
    vectors = np.zeros((k_max, len(nodes)))
    vectors[0] = np.sqrt(weights / total)
    a = np.zeros(k_max)
    b = np.zeros(k_max)
    beta_prev = 0.0
    for k in range(k_max):
        v = nodes * vectors[k]
        a[k] = vectors[k] @ v
        v -= a[k] * vectors[k]
        if k > 0:
            v -= beta_prev * vectors[k - 1]
        basis = vectors[: k + 1]
        for _ in range(2):
            v -= basis.T @ (basis @ v)
        if k + 1 == k_max:
            break
        beta = float(np.linalg.norm(v))
        if not beta > np.finfo(float).eps * truncation:
            raise LostPositivity(
                f"Recurrence weight b_{k + 1} lost positivity; raise quadrature"
                " precision or lower k_max"
            )
        b[k + 1] = beta * beta
        vectors[k + 1] = v / beta
        beta_prev = beta
    log_c2 = log_c2_0 + np.concatenate(([0.0], np.cumsum(np.log(b[1:]))))
    return a, b, log_c2


def _change(
    old: tuple[np.ndarray, np.ndarray, np.ndarray],
    new: tuple[np.ndarray, np.ndarray, np.ndarray],
) -> float:
    a_old, b_old, c_old = old
    a_new, b_new, c_new = new
    scale = math.sqrt(float(np.max(b_new))) if len(b_new) > 1 else 1.0
    scale = max(scale, float(np.max(np.abs(a_new))), 1e-300)
    change = float(np.max(np.abs(a_new - a_old))) / scale
    if len(b_new) > 1:
        change = max(
            change, float(np.max(np.abs(b_new[1:] - b_old[1:]) / b_new[1:]))
        )
    return max(change, abs(float(c_new[0] - c_old[0])))


def monic_taylor(
    table: RecurrenceTable, z: complex, k_stop: int, order: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Taylor coefficients pi_k^{(r)}(z)/r! for k < k_stop and r <= order.

    The true coefficient is coeffs[k, r] * exp(log_scale[k]).
    """
    if k_stop > table.k_max:
        raise IndexOutOfTable(
            f"Index {k_stop - 1} outside recurrence table of depth {table.k_max}"
        )
    z = complex(z)
    coeffs = np.zeros((k_stop, order + 1), dtype=complex)
    log_scale = np.zeros(k_stop)
    current = np.zeros(order + 1, dtype=complex)
    current[0] = 1.0
    previous = np.zeros(order + 1, dtype=complex)
    scale = 0.0
    for k in range(k_stop):
        coeffs[k] = current
        log_scale[k] = scale
        if k + 1 == k_stop:
            break
        following = (z - table.a[k]) * current
        following[1:] += current[:-1]
        if k > 0:
            following -= table.b[k] * previous
        previous, current = current, following
        peak = max(float(np.max(np.abs(current))), float(np.max(np.abs(previous))))
        if peak > _RESCALE_HIGH or 0 < peak < _RESCALE_LOW:
            current = current / peak
            previous = previous / peak
            scale += math.log(peak)
    return coeffs, log_scale


def monic_taylor_scaled(
    table: RecurrenceTable, z: complex, k: int, order: int = 0
) -> list[ScaledComplex]:
    table.check_index(k)
    coeffs, log_scale = monic_taylor(table, z, k + 1, order)
    return [
        ScaledComplex.from_complex(coeffs[k, r], log_scale[k]) for r in range(order + 1)
    ]


def eval_monic(
    table: RecurrenceTable, k: int, z: complex
) -> tuple[ScaledComplex, ScaledComplex]:
    """pi_k(z) and pi_k'(z)."""
    value, taylor_1 = monic_taylor_scaled(table, z, k, order=1)
    return value, taylor_1


def eval_monic_nodes(
    table: RecurrenceTable, ks: Iterable[int], x: np.ndarray
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """pi_k on real nodes for every k in ks, as (values, per-node log scale)."""
    wanted = sorted(set(ks))
    for k in wanted:
        table.check_index(k)
    result: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    current = np.ones_like(x, dtype=float)
    previous = np.zeros_like(x, dtype=float)
    scale = np.zeros_like(x, dtype=float)
    last = wanted[-1] if wanted else -1
    for k in range(last + 1):
        if k in wanted:
            result[k] = (current.copy(), scale.copy())
        if k == last:
            break
        following = (x - table.a[k]) * current - table.b[k] * previous
        previous, current = current, following
        peak = np.maximum(np.abs(current), np.abs(previous))
        big = peak > _RESCALE_HIGH
        if np.any(big):
            current[big] /= peak[big]
            previous[big] /= peak[big]
            scale[big] += np.log(peak[big])
    return result


def gamma_const(table: RecurrenceTable, k: int) -> ScaledComplex:
    """gamma_k = -2 pi i / c_k^2."""
    table.check_index(k)
    return ScaledComplex(
        log_mag=math.log(2 * math.pi) - float(table.log_c2[k]), phase=-1j
    )


def orthogonality_residual(table: RecurrenceTable, q: QuadratureSpec) -> float:
    """max_{j != k} |<pi_j, pi_k>| / (c_j c_k) on the table's own quadrature."""
    nodes, gl_weights = panel_nodes(
        uniform_edges(-table.truncation, table.truncation, table.panels),
        q.nodes_per_panel,
    )
    values = eval_monic_nodes(table, range(table.k_max), nodes)
    logs = log_weight(table.cfg, nodes)
    rows = []
    for k in range(table.k_max):
        pk, sk = values[k]
        # orthonormal values times sqrt(weight)
        rows.append(pk * np.exp(sk + 0.5 * logs - 0.5 * table.log_c2[k]))
    basis = np.array(rows)
    gram = (basis * gl_weights[None, :]) @ basis.T
    off_diagonal = gram - np.diag(np.diag(gram))
    return float(np.max(np.abs(off_diagonal))) if table.k_max > 1 else 0.0
