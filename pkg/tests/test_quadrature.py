import math

import numpy as np
import pytest

from charpoly.utils.quadrature import (
    gauss_legendre,
    graded_edges,
    halve_panels,
    interval_rule,
    panel_nodes,
    uniform_edges,
)


def test_gauss_legendre_is_exact_to_degree_2n_minus_1():
    nodes, weights = gauss_legendre(6)
    for degree in range(12):
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert np.sum(weights * nodes**degree) == pytest.approx(exact, abs=1e-14)


def test_gauss_legendre_arrays_are_read_only():
    nodes, _ = gauss_legendre(4)
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_composite_rule_integrates_gaussian():
    nodes, weights = panel_nodes(uniform_edges(-10.0, 10.0, 16), 24)
    assert np.sum(weights * np.exp(-nodes**2)) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_interval_rule_maps_the_interval():
    nodes, weights = interval_rule(1.0, 3.0, 5, panels=2)
    assert np.all((nodes > 1.0) & (nodes < 3.0))
    assert np.sum(weights) == pytest.approx(2.0)


def test_halve_panels_keeps_edges():
    edges = uniform_edges(0.0, 1.0, 4)
    refined = halve_panels(edges)
    assert len(refined) == 9
    assert np.allclose(refined[0::2], edges)


def test_graded_edges_refine_towards_center():
    edges = graded_edges(uniform_edges(-4.0, 4.0, 8), center=0.3, floor=1e-3)
    widths = np.diff(edges)
    assert edges[0] == -4.0 and edges[-1] == 4.0
    assert np.all(widths > 0)
    assert 0.3 in edges
    nearest = np.argmin(np.abs(edges - 0.3))
    assert widths[max(nearest - 1, 0)] <= 1e-3 + 1e-15
    assert widths.max() > 0.5
