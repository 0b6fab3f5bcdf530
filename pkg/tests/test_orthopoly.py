import math

import numpy as np
import pytest

from charpoly.models import EnsembleConfig, Potential, QuadratureSpec
from charpoly.utils.errors import IndexOutOfTable
from charpoly.utils.orthopoly import (
    build_recurrence,
    eval_monic,
    gamma_const,
    monic_taylor,
    orthogonality_residual,
)


def hermite_monic(k: int, n: int, x: complex) -> complex:
    """Monic orthogonal polynomial for exp(-n x^2 / 2): pi_{k+1} = x pi_k - (k/n) pi_{k-1}."""
    previous, current = 0.0, 1.0
    for j in range(k):
        previous, current = current, x * current - (j / n) * previous
    return current


def test_gaussian_recurrence_coefficients(gaussian_table):
    n = gaussian_table.cfg.n
    assert np.allclose(gaussian_table.a, 0.0)
    for k in range(1, gaussian_table.k_max):
        assert gaussian_table.b[k] == pytest.approx(k / n, rel=1e-11)


def test_gaussian_norms(gaussian_table):
    n = gaussian_table.cfg.n
    for k in range(gaussian_table.k_max):
        expected = 0.5 * math.log(2 * math.pi / n) + math.lgamma(k + 1) - k * math.log(n)
        assert gaussian_table.log_c2[k] == pytest.approx(expected, abs=1e-10)


def test_quartic_table_is_even_and_orthogonal(quartic_table, q):
    assert np.all(quartic_table.a == 0.0)
    assert np.all(quartic_table.b[1:] > 0)
    assert orthogonality_residual(quartic_table, q) < 1e-10


def test_asymmetric_potential_has_nonzero_a():
    cfg = EnsembleConfig(potential=Potential(coeffs=(0.3, 0.5)), n=4)
    table = build_recurrence(cfg, 6)
    # V = x^2/2 + 0.3 x is the Gaussian centred at -0.3
    assert np.allclose(table.a, -0.3, atol=1e-10)


def test_monic_values_and_derivatives(gaussian_table):
    n = gaussian_table.cfg.n
    z = 0.4 + 0.3j
    for k in (0, 1, 5, 12):
        value, derivative = eval_monic(gaussian_table, k, z)
        assert value.to_complex() == pytest.approx(hermite_monic(k, n, z), rel=1e-12)
        h = 1e-6
        numeric = (hermite_monic(k, n, z + h) - hermite_monic(k, n, z - h)) / (2 * h)
        assert derivative.to_complex() == pytest.approx(numeric, rel=1e-6, abs=1e-9)


def test_monic_taylor_second_order(gaussian_table):
    coeffs, scale = monic_taylor(gaussian_table, 0.2, 4, order=2)
    # pi_3 = x^3 - 3x/n; second Taylor coefficient is 3x
    assert coeffs[3, 2] * math.exp(scale[3]) == pytest.approx(0.6)


def test_large_degree_stays_finite():
    cfg = EnsembleConfig(potential=Potential(coeffs=(0.0, 0.5)), n=200)
    table = build_recurrence(cfg, 201)
    value, _ = eval_monic(table, 200, 3.0 + 0.5j)
    assert math.isfinite(value.log_mag)


def test_gamma_const(gaussian_table):
    gamma = gamma_const(gaussian_table, 3)
    expected = -2j * math.pi / math.exp(gaussian_table.log_c2[3])
    assert gamma.to_complex() == pytest.approx(expected)


def test_index_checks(gaussian_table):
    with pytest.raises(IndexOutOfTable):
        gaussian_table.check_index(gaussian_table.k_max)
    with pytest.raises(IndexOutOfTable):
        monic_taylor(gaussian_table, 0.0, gaussian_table.k_max + 1)
    with pytest.raises(IndexOutOfTable):
        build_recurrence(EnsembleConfig(potential=Potential(coeffs=(0.0, 1.0)), n=2), 0)


def test_build_is_cached():
    cfg = EnsembleConfig(potential=Potential(coeffs=(0.0, 0.5)), n=5)
    assert build_recurrence(cfg, 7, QuadratureSpec()) is build_recurrence(cfg, 7, QuadratureSpec())
