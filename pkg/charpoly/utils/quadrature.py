"""Composite Gauss-Legendre panel rules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=16)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def uniform_edges(lo: float, hi: float, panels: int) -> np.ndarray:
    return np.linspace(lo, hi, panels + 1)


def panel_nodes(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule mapped on every [edges[i], edges[i+1]]."""
    base_nodes, base_weights = gauss_legendre(n)
    left = edges[:-1, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    nodes = left + half * (base_nodes[None, :] + 1.0)
    weights = half * base_weights[None, :]
    return nodes.ravel(), weights.ravel()


def halve_panels(edges: np.ndarray) -> np.ndarray:
    midpoints = 0.5 * (edges[:-1] + edges[1:])
    refined = np.empty(2 * len(edges) - 1)
    refined[0::2] = edges
    refined[1::2] = midpoints
    return refined


def graded_edges(edges: np.ndarray, center: float, floor: float) -> np.ndarray:
    """Splits panels until each is no wider than max(floor, its distance to center)."""
    pending = list(zip(edges[:-1], edges[1:]))
    done: list[tuple[float, float]] = []
    while pending:
        lo, hi = pending.pop()
        if center < lo:
            distance = lo - center
        elif center > hi:
            distance = center - hi
        else:
            distance = 0.0
        if hi - lo > max(floor, distance):
            mid = 0.5 * (lo + hi)
            if lo < center < hi and floor < hi - lo:
                # put a breakpoint on the peak itself
                mid = center
            pending.append((lo, mid))
            pending.append((mid, hi))
        else:
            done.append((lo, hi))
    done.sort()
    return np.array([done[0][0]] + [hi for _, hi in done])


def interval_rule(
    lo: float, hi: float, n: int, panels: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    return panel_nodes(uniform_edges(lo, hi, panels), n)
