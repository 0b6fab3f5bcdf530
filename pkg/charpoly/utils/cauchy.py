"""Cauchy transforms h_k(eps) = 1/(2 pi i) int exp(-N V(x)) pi_k(x) / (x - eps) dx.

Quadrature runs on the equivalent positive integrand

    h_k(eps) = 1/(2 pi i pi_k(eps)) int exp(-N V(x)) pi_k(x)^2 / (x - eps) dx,

which holds because (pi_k(x) - pi_k(eps)) / (x - eps) has degree k - 1. The
plain form cancels to many digits once k is large; this one does not.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from charpoly import config
from charpoly.models import EnsembleConfig, QuadratureSpec
from charpoly.utils.ensemble import log_weight
from charpoly.utils.errors import CharpolyError, NonConvergedQuadrature, OnRealAxis
from charpoly.utils.orthopoly import RecurrenceTable, eval_monic_nodes, monic_taylor
from charpoly.utils.quadrature import graded_edges, halve_panels, panel_nodes, uniform_edges
from charpoly.utils.scaled import ScaledComplex

log = logging.getLogger(__name__)


def check_off_axis(table: RecurrenceTable, eps: complex) -> None:
    eps = complex(eps)
    if eps.imag == 0:
        raise OnRealAxis(f"Cauchy transform requested on the real axis at {eps}")
    if abs(eps.imag) < config.MIN_AXIS_OFFSET * table.support_scale():
        raise OnRealAxis(
            f"Cauchy transform at {eps} is closer to the real axis than"
            f" {config.MIN_AXIS_OFFSET:g} of the support scale"
        )


def cauchy_taylor(
    table: RecurrenceTable,
    cfg: EnsembleConfig,
    ks: list[int],
    eps: complex,
    q: QuadratureSpec,
    order: int = 0,
) -> dict[int, list[ScaledComplex]]:
    """Taylor coefficients h_k^{(r)}(eps)/r!, r <= order, for every k in ks."""
    eps = complex(eps)
    check_off_axis(table, eps)
    for k in ks:
        table.check_index(k)
    ks = sorted(set(ks))
    if not ks:
        return {}
    moments = _moment_integrals(table, cfg, ks, eps, q, order)
    poly, poly_scale = monic_taylor(table, eps, ks[-1] + 1, order)
    result: dict[int, list[ScaledComplex]] = {}
    for k in ks:
        integrals, top = moments[k]
        p = poly[k]
        mantissas: list[complex] = []
        for r in range(order + 1):
            acc = integrals[r] / (2j * math.pi)
            for j in range(1, r + 1):
                acc -= p[j] * mantissas[r - j]
            mantissas.append(acc / p[0])
        result[k] = [
            ScaledComplex.from_complex(m, top - poly_scale[k]) for m in mantissas
        ]
    return result


def _moment_integrals(
    table: RecurrenceTable,
    cfg: EnsembleConfig,
    ks: list[int],
    eps: complex,
    q: QuadratureSpec,
    order: int,
) -> dict[int, tuple[np.ndarray, float]]:
    """int w pi_k^2 / (x - eps)^{r+1} dx for r <= order, as (mantissas, log scale)."""
    base = uniform_edges(-table.truncation, table.truncation, table.panels)
    center = min(max(eps.real, -table.truncation), table.truncation)
    edges = graded_edges(base, center, abs(eps.imag))
    threshold = max(q.tol, 64 * np.finfo(float).eps)
    coarse = _integrate(table, cfg, ks, eps, edges, q.nodes_per_panel, order)
    while True:
        if 2 * (len(edges) - 1) > q.max_panels:
            raise NonConvergedQuadrature(
                f"Cauchy transform at {eps} did not converge within"
                f" {q.max_panels} panels"
            )
        edges = halve_panels(edges)
        fine = _integrate(table, cfg, ks, eps, edges, q.nodes_per_panel, order)
        if all(_agrees(coarse[k], fine[k], threshold) for k in ks):
            if 4 * (len(edges) - 1) > q.max_panels:
                log.warning(
                    "Cauchy transform at %s used %d of %d panels",
                    eps,
                    len(edges) - 1,
                    q.max_panels,
                )
            return {k: (fine[k][0], fine[k][2]) for k in ks}
        coarse = fine


def _integrate(
    table: RecurrenceTable,
    cfg: EnsembleConfig,
    ks: list[int],
    eps: complex,
    edges: np.ndarray,
    nodes_per_panel: int,
    order: int,
) -> dict[int, tuple[np.ndarray, np.ndarray, float]]:
    nodes, weights = panel_nodes(edges, nodes_per_panel)
    logs = log_weight(cfg, nodes)
    values = eval_monic_nodes(table, ks, nodes)
    inverse = 1.0 / (nodes - eps)
    powers = [inverse]
    for _ in range(order):
        powers.append(powers[-1] * inverse)
    out = {}
    for k in ks:
        p, s = values[k]
        with np.errstate(divide="ignore"):
            magnitude = logs + 2.0 * (np.log(np.abs(p)) + s)
        top = float(np.max(magnitude))
        density = weights * np.exp(magnitude - top)
        integrals = np.array([np.sum(density * power) for power in powers])
        l1 = np.array([np.sum(density * np.abs(power)) for power in powers])
        out[k] = (integrals, l1, top)
    return out


def _agrees(
    coarse: tuple[np.ndarray, np.ndarray, float],
    fine: tuple[np.ndarray, np.ndarray, float],
    threshold: float,
) -> bool:
    integrals_c, _, top_c = coarse
    integrals_f, l1_f, top_f = fine
    rescaled = integrals_c * math.exp(top_c - top_f)
    return bool(np.all(np.abs(rescaled - integrals_f) <= threshold * l1_f))


def eval_cauchy(
    table: RecurrenceTable,
    cfg: EnsembleConfig,
    k: int,
    eps: complex,
    q: QuadratureSpec,
) -> ScaledComplex:
    return cauchy_taylor(table, cfg, [k], eps, q)[k][0]


def cauchy_batch(
    table: RecurrenceTable,
    cfg: EnsembleConfig,
    k_list: list[int],
    eps_list: list[complex],
    q: QuadratureSpec,
) -> list[list[ScaledComplex]]:
    """Matrix of h_k(eps) with rows indexed by k_list and columns by eps_list."""
    columns = []
    for j, eps in enumerate(eps_list):
        try:
            values = cauchy_taylor(table, cfg, list(k_list), eps, q)
        except CharpolyError as ex:
            raise type(ex)(f"cauchy_batch entry eps[{j}]={eps}: {ex}") from ex
        columns.append([values[k][0] for k in k_list])
    return [[columns[j][i] for j in range(len(eps_list))] for i in range(len(k_list))]
