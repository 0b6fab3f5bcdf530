import math

import pytest
from scipy.special import wofz

from charpoly.utils.cauchy import cauchy_batch, cauchy_taylor, eval_cauchy
from charpoly.utils.errors import IndexOutOfTable, OnRealAxis
from charpoly.utils.orthopoly import eval_monic, gamma_const


def gaussian_h0(n: int, eps: complex) -> complex:
    """h_0 for exp(-n x^2 / 2) through the Faddeeva function."""
    z = eps * math.sqrt(n / 2)
    if eps.imag > 0:
        return wofz(z) / 2
    return -wofz(-z) / 2


@pytest.mark.parametrize("eps", [0.3 + 0.5j, -1.2 + 0.1j, 0.0 - 0.7j, 2.5 + 0.2j])
def test_h0_matches_faddeeva(gaussian_cfg, gaussian_table, q, eps):
    value = eval_cauchy(gaussian_table, gaussian_cfg, 0, eps, q)
    assert value.to_complex() == pytest.approx(gaussian_h0(gaussian_cfg.n, eps), rel=1e-10)


@pytest.mark.parametrize("eps", [0.1 + 0.5j, -0.4 - 0.2j, 1.7 + 1.1j])
def test_det_y_relation(gaussian_cfg, gaussian_table, q, eps):
    n = gaussian_cfg.n
    values = cauchy_taylor(gaussian_table, gaussian_cfg, [n - 1, n], eps, q)
    pi_n, _ = eval_monic(gaussian_table, n, eps)
    pi_m, _ = eval_monic(gaussian_table, n - 1, eps)
    gamma = gamma_const(gaussian_table, n - 1)
    total = pi_n * gamma * values[n - 1][0] - values[n][0] * gamma * pi_m
    assert total.to_complex() == pytest.approx(1.0, abs=1e-9)


def test_det_y_relation_quartic(quartic_cfg, quartic_table, q):
    n = quartic_cfg.n
    eps = 0.2 + 0.3j
    values = cauchy_taylor(quartic_table, quartic_cfg, [n - 1, n], eps, q)
    pi_n, _ = eval_monic(quartic_table, n, eps)
    pi_m, _ = eval_monic(quartic_table, n - 1, eps)
    gamma = gamma_const(quartic_table, n - 1)
    total = pi_n * gamma * values[n - 1][0] - values[n][0] * gamma * pi_m
    assert total.to_complex() == pytest.approx(1.0, abs=1e-9)


def test_taylor_coefficients_match_finite_differences(gaussian_cfg, gaussian_table, q):
    eps = 0.25 + 0.4j
    k = 6
    taylor = cauchy_taylor(gaussian_table, gaussian_cfg, [k], eps, q, order=2)[k]
    step = 1e-4

    def h(z):
        return eval_cauchy(gaussian_table, gaussian_cfg, k, z, q).to_complex()

    first = (h(eps + step) - h(eps - step)) / (2 * step)
    second = (h(eps + step) - 2 * h(eps) + h(eps - step)) / step**2
    assert taylor[1].to_complex() == pytest.approx(first, rel=1e-6)
    assert taylor[2].to_complex() == pytest.approx(second / 2, rel=1e-3)


def test_conjugate_symmetry(gaussian_cfg, gaussian_table, q):
    eps = 0.3 + 0.6j
    upper = eval_cauchy(gaussian_table, gaussian_cfg, 3, eps, q).to_complex()
    lower = eval_cauchy(gaussian_table, gaussian_cfg, 3, eps.conjugate(), q).to_complex()
    # real weight and polynomial: h_k(conj e) = -conj h_k(e)
    assert lower == pytest.approx(-upper.conjugate(), rel=1e-10)


def test_large_eps_decay(gaussian_cfg, gaussian_table, q):
    k = 4
    eps = 40.0 + 40.0j
    value = eval_cauchy(gaussian_table, gaussian_cfg, k, eps, q).to_complex()
    c2 = math.exp(gaussian_table.log_c2[k])
    # h_k(e) ~ -c_k^2 / (2 pi i) e^{-k-1}
    assert value == pytest.approx(-c2 / (2j * math.pi) * eps ** (-k - 1), rel=1e-2)


def test_real_axis_is_refused(gaussian_cfg, gaussian_table, q):
    with pytest.raises(OnRealAxis):
        eval_cauchy(gaussian_table, gaussian_cfg, 0, 0.5, q)
    with pytest.raises(OnRealAxis):
        eval_cauchy(gaussian_table, gaussian_cfg, 0, 0.5 + 1e-9j, q)


def test_batch_shape_and_error_context(gaussian_cfg, gaussian_table, q):
    grid = cauchy_batch(gaussian_table, gaussian_cfg, [0, 2], [0.1 + 0.5j, -0.1 - 0.5j], q)
    assert len(grid) == 2 and len(grid[0]) == 2
    single = eval_cauchy(gaussian_table, gaussian_cfg, 2, -0.1 - 0.5j, q)
    assert grid[1][1].to_complex() == pytest.approx(single.to_complex())
    with pytest.raises(OnRealAxis, match=r"eps\[1\]"):
        cauchy_batch(gaussian_table, gaussian_cfg, [0], [0.1 + 0.5j, 0.3], q)
    with pytest.raises(IndexOutOfTable):
        cauchy_batch(gaussian_table, gaussian_cfg, [gaussian_table.k_max], [0.1 + 0.5j], q)


def test_empty_index_lists(gaussian_cfg, gaussian_table, q):
    assert cauchy_taylor(gaussian_table, gaussian_cfg, [], 0.2 + 0.5j, q) == {}
    assert cauchy_batch(gaussian_table, gaussian_cfg, [], [0.2 + 0.5j, -0.3j], q) == []
    assert cauchy_batch(gaussian_table, gaussian_cfg, [0, 1], [], q) == [[], []]
