import math

import numpy as np
import pytest

from charpoly.models import GAUSSIAN, EnsembleConfig, Potential
from charpoly.utils.cauchy import eval_cauchy
from charpoly.utils.correlators import (
    CorrelatorKind,
    CorrelatorSpec,
    F1Form,
    corr_general,
    corr_inverse,
    corr_ratios,
    evaluate,
    evaluate_config,
    moment_negative,
    moment_positive,
    upsilon_plus,
)
from charpoly.utils.errors import (
    ConfluentOrderTooHigh,
    IndexOutOfTable,
    InvalidCorrelatorSpec,
    OutsideSupport,
    PermutationBudgetExceeded,
)
from charpoly.utils.kernels import FiniteKernels
from charpoly.utils.orthopoly import build_recurrence, eval_monic, gamma_const

QUARTIC = Potential(coeffs=(0.0, 0.0, 0.0, 1.0))
RTOL = 1e-8


def value_of(spec, table, q, **kwargs):
    return evaluate(spec, table, q, **kwargs).to_complex()


@pytest.fixture(params=["gaussian", "quartic"])
def ensemble(request, gaussian_table, quartic_table):
    return gaussian_table if request.param == "gaussian" else quartic_table


@pytest.mark.parametrize("eps", [0.1 + 0.5j, -0.7 - 0.2j])
def test_ratio_at_coincidence_is_one(ensemble, q, eps):
    spec = CorrelatorSpec(CorrelatorKind.F2, mu=(eps,), eps=(eps,))
    assert value_of(spec, ensemble, q) == pytest.approx(1.0, abs=1e-10)


def test_single_averages(ensemble, q):
    n = ensemble.cfg.n
    mu, eps = 0.3 - 0.2j, -0.2 + 0.45j
    average = corr_general(1, 0, (), (mu,), ensemble, q).to_complex()
    assert average == pytest.approx(eval_monic(ensemble, n, mu)[0].to_complex(), rel=1e-12)
    inverse = corr_general(0, 1, (eps,), (), ensemble, q)
    expected = gamma_const(ensemble, n - 1) * eval_cauchy(ensemble, ensemble.cfg, n - 1, eps, q)
    assert inverse.to_complex() == pytest.approx(expected.to_complex(), rel=1e-12)


def test_products_kernel_form_matches_polynomial_form(ensemble, q):
    spec = CorrelatorSpec(CorrelatorKind.F1, lam=(0.2 + 0.1j, -0.5j), mu=(0.4, -0.3 + 0.2j))
    kernel = value_of(spec, ensemble, q, form=F1Form.kernel)
    polynomial = value_of(spec, ensemble, q, form=F1Form.polynomial)
    assert kernel == pytest.approx(polynomial, rel=RTOL)


@pytest.mark.parametrize(
    "spec",
    [
        CorrelatorSpec(CorrelatorKind.F2, mu=(0.3, -0.1 + 0.2j), eps=(0.2 + 0.4j, -0.5 - 0.3j)),
        CorrelatorSpec(
            CorrelatorKind.F4, mu=(0.1, 0.4 + 0.2j, -0.3 - 0.1j), eps=(0.25 + 0.5j,)
        ),
        CorrelatorSpec(
            CorrelatorKind.F4,
            mu=(0.1, 0.5j, -0.3, 0.2 - 0.2j, 0.6),
            eps=(0.25 + 0.5j, -0.1 - 0.4j, 0.3 + 0.2j),
        ),
        CorrelatorSpec(
            CorrelatorKind.F5, mu=(0.15 + 0.1j,), eps=(0.2 + 0.4j, -0.3 - 0.5j, 0.4 - 0.2j)
        ),
    ],
    ids=["f2", "f4-3-1", "f4-5-3", "f5-1-3"],
)
def test_specialised_forms_match_general_formula(ensemble, q, spec):
    general = corr_general(len(spec.mu), len(spec.eps), spec.eps, spec.mu, ensemble, q)
    assert value_of(spec, ensemble, q) == pytest.approx(general.to_complex(), rel=RTOL)


@pytest.mark.parametrize("k", [1, 2])
def test_inverse_products_match_general_formula(ensemble, q, k):
    eps = (0.2 + 0.4j, -0.1 + 0.3j)[:k]
    omega = (-0.3 - 0.5j, 0.4 - 0.2j)[:k]
    spec = CorrelatorSpec(CorrelatorKind.F3, eps=eps, omega=omega)
    general = corr_general(0, 2 * k, eps + omega, (), ensemble, q)
    assert value_of(spec, ensemble, q) == pytest.approx(general.to_complex(), rel=RTOL)


def test_inverse_pair_closed_form(gaussian_table, q):
    n = gaussian_table.cfg.n
    eps, omega = 0.2 + 0.4j, -0.3 - 0.5j
    spec = CorrelatorSpec(CorrelatorKind.F3, eps=(eps,), omega=(omega,))
    kernels = FiniteKernels(gaussian_table, q)
    closed = -(kernels.gamma(n - 2) * kernels.gamma(n - 1) * kernels.w3(n - 1, eps, omega))
    assert value_of(spec, gaussian_table, q) == pytest.approx(closed.to_complex(), rel=RTOL)


def test_mixed_degenerates_to_products(quartic_table, q):
    mu1, mu2, mu3 = 0.1 + 0.2j, -0.4, 0.3 - 0.35j
    mixed = CorrelatorSpec(CorrelatorKind.F4, mu=(mu1, mu2, mu3), eps=(mu3,))
    products = CorrelatorSpec(CorrelatorKind.F1, lam=(mu1,), mu=(mu2,))
    assert value_of(mixed, quartic_table, q) == pytest.approx(
        value_of(products, quartic_table, q), rel=RTOL
    )


def test_mixed_degenerates_to_inverse_products(gaussian_table, q):
    e1, e2, e3 = 0.2 + 0.4j, -0.3 - 0.5j, 0.1 + 0.25j
    mixed = CorrelatorSpec(CorrelatorKind.F5, mu=(e3,), eps=(e1, e2, e3))
    inverse = CorrelatorSpec(CorrelatorKind.F3, eps=(e1,), omega=(e2,))
    assert value_of(mixed, gaussian_table, q) == pytest.approx(
        value_of(inverse, gaussian_table, q), rel=RTOL
    )


def test_ratio_is_continuous_near_coincidence(gaussian_table, q):
    eps = 0.2 + 0.3j
    exact = CorrelatorSpec(CorrelatorKind.F2, mu=(eps, 0.5), eps=(eps, -0.1 - 0.4j))
    near = CorrelatorSpec(CorrelatorKind.F2, mu=(eps + 1e-7, 0.5), eps=(eps, -0.1 - 0.4j))
    assert value_of(near, gaussian_table, q) == pytest.approx(
        value_of(exact, gaussian_table, q), rel=1e-5
    )


def test_double_arguments_match_general_formula(quartic_table, q):
    spec = CorrelatorSpec(
        CorrelatorKind.F2, mu=(0.3 + 0.1j, 0.3 + 0.1j), eps=(-0.2 + 0.4j, -0.2 + 0.4j)
    )
    general = corr_general(2, 2, spec.eps, spec.mu, quartic_table, q)
    assert value_of(spec, quartic_table, q) == pytest.approx(general.to_complex(), rel=1e-7)


def test_double_inverse_arguments_match_general_formula(quartic_table, q):
    z, w = 0.15 + 0.35j, -0.2 - 0.4j
    spec = CorrelatorSpec(CorrelatorKind.F3, eps=(z, z), omega=(w, w))
    general = corr_general(0, 4, (z, z, w, w), (), quartic_table, q)
    assert value_of(spec, quartic_table, q) == pytest.approx(general.to_complex(), rel=1e-7)


def test_triple_inverse_arguments_use_the_determinant(gaussian_table, q):
    z, w = 0.1 + 0.3j, 0.2 - 0.5j
    spec = CorrelatorSpec(CorrelatorKind.F3, eps=(z, z, z), omega=(w, w, w))
    value = corr_inverse(spec, gaussian_table, q)
    general = corr_general(0, 6, (z, z, z, w, w, w), (), gaussian_table, q)
    assert math.isfinite(value.log_mag)
    assert value.to_complex() == pytest.approx(general.to_complex(), rel=1e-12)


def test_triple_arguments_are_refused(gaussian_table, q):
    spec = CorrelatorSpec(CorrelatorKind.F2, mu=(0.1, 0.2, 0.3), eps=(0.5j, 0.5j, 0.5j))
    with pytest.raises(ConfluentOrderTooHigh):
        evaluate(spec, gaussian_table, q)


def test_invalid_specs():
    with pytest.raises(InvalidCorrelatorSpec):
        CorrelatorSpec(CorrelatorKind.F4, mu=(0.1, 0.2), eps=(0.5j,))
    with pytest.raises(InvalidCorrelatorSpec):
        CorrelatorSpec(CorrelatorKind.F5, mu=(0.1, 0.2, 0.3), eps=(0.5j,))
    with pytest.raises(InvalidCorrelatorSpec):
        CorrelatorSpec(CorrelatorKind.F1, lam=(0.1,), mu=(0.2,), eps=(0.5j,))
    with pytest.raises(InvalidCorrelatorSpec):
        CorrelatorSpec(CorrelatorKind.F3, eps=(0.5j,), omega=())
    assert CorrelatorSpec(CorrelatorKind.GENERAL).numerators() == ()


def test_budgets_and_depth(gaussian_table, q):
    spec = CorrelatorSpec(
        CorrelatorKind.F3, eps=tuple(0.1j * (i + 1) for i in range(5)), omega=(-0.3j,) * 5
    )
    with pytest.raises(PermutationBudgetExceeded):
        evaluate(spec, gaussian_table, q)
    shallow = build_recurrence(gaussian_table.cfg, gaussian_table.cfg.n, q)
    with pytest.raises(IndexOutOfTable):
        evaluate(CorrelatorSpec(CorrelatorKind.F2, mu=(0.1,), eps=(0.5j,)), shallow, q)


def test_evaluate_config_builds_its_own_table(q):
    cfg = EnsembleConfig(potential=GAUSSIAN, n=5)
    spec = CorrelatorSpec(CorrelatorKind.F2, mu=(0.3j,), eps=(0.3j,))
    assert evaluate_config(spec, cfg, q).to_complex() == pytest.approx(1.0, abs=1e-10)


def test_upsilon_plus():
    assert upsilon_plus(1) == pytest.approx(1.0)
    assert upsilon_plus(2) == pytest.approx(1 / 12)


@pytest.fixture(scope="module")
def bulk_cfg():
    return EnsembleConfig(potential=GAUSSIAN, n=100)


@pytest.fixture(scope="module")
def bulk_table(bulk_cfg, q):
    return build_recurrence(bulk_cfg, 106, q)


@pytest.mark.slow
@pytest.mark.parametrize("k, expected, rel", [(1, 1.0, 0.05), (2, 1 / 12, 0.05)])
def test_positive_moment_universal_ratio(bulk_cfg, bulk_table, q, k, expected, rel):
    result = moment_positive(0.0, k, bulk_cfg, bulk_table, q)
    assert result.universal_ratio == pytest.approx(expected, rel=rel)


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 2])
def test_negative_moment_divergence(bulk_cfg, bulk_table, q, k):
    deltas = [0.2, 0.5, 1.0, 2.0]
    logs = []
    for delta in deltas:
        result = moment_negative(0.0, delta, k, bulk_cfg, bulk_table, q)
        assert (result.exact / result.asymptotic).to_complex().real == pytest.approx(1.0, rel=0.1)
        logs.append(result.exact.log_mag)
    slope, _ = np.polyfit(np.log(deltas), logs, 1)
    assert slope == pytest.approx(-k * k, rel=0.07)


def test_moment_arguments_are_checked(gaussian_cfg, gaussian_table, q):
    with pytest.raises(InvalidCorrelatorSpec):
        moment_negative(0.0, 0.0, 1, gaussian_cfg, gaussian_table, q)
    with pytest.raises(ConfluentOrderTooHigh):
        moment_positive(0.0, 0, gaussian_cfg, gaussian_table, q)
    assert math.isfinite(moment_positive(0.0, 1, gaussian_cfg, gaussian_table, q).exact.log_mag)


def test_negative_moment_goes_through_inverse_products(gaussian_cfg, gaussian_table, q):
    result = moment_negative(0.1, 1.0, 2, gaussian_cfg, gaussian_table, q)
    spec = CorrelatorSpec(
        CorrelatorKind.F3,
        eps=(0.1 + result.offset,) * 2,
        omega=(0.1 - result.offset,) * 2,
    )
    direct = corr_inverse(spec, gaussian_table, q)
    assert result.exact.to_complex() == pytest.approx(direct.to_complex(), rel=1e-12)


def test_moments_need_a_bulk_point(gaussian_cfg, gaussian_table, q):
    # the Gaussian support edge is sqrt(2)
    with pytest.raises(OutsideSupport):
        moment_positive(1.3, 1, gaussian_cfg, gaussian_table, q)
    with pytest.raises(OutsideSupport):
        moment_negative(-1.3, 1.0, 1, gaussian_cfg, gaussian_table, q)
    assert math.isfinite(moment_positive(1.2, 1, gaussian_cfg, gaussian_table, q).exact.log_mag)


@pytest.mark.slow
@pytest.mark.parametrize("potential", [GAUSSIAN, QUARTIC], ids=["gaussian", "quartic"])
@pytest.mark.parametrize("n", [8, 20, 50])
def test_unit_ratio_on_random_points(q, off_axis, potential, n):
    table = build_recurrence(EnsembleConfig(potential=potential, n=n), n + 1, q)
    for z in off_axis(100):
        spec = CorrelatorSpec(CorrelatorKind.F2, mu=(z,), eps=(z,))
        assert abs(corr_ratios(spec, table, q).to_complex() - 1) < 1e-8, z


@pytest.mark.slow
@pytest.mark.parametrize(
    "kind, k, m",
    [
        (CorrelatorKind.F1, 1, 0),
        (CorrelatorKind.F1, 3, 0),
        (CorrelatorKind.F2, 1, 1),
        (CorrelatorKind.F2, 3, 3),
        (CorrelatorKind.F3, 0, 2),
        (CorrelatorKind.F3, 0, 3),
        (CorrelatorKind.F4, 3, 1),
        (CorrelatorKind.F5, 1, 3),
    ],
)
def test_specialised_forms_on_random_arguments(q, off_axis, kind, k, m):
    cfg = EnsembleConfig(potential=QUARTIC, n=12)
    table = build_recurrence(cfg, cfg.n + 7, q)
    for _ in range(20):
        if kind == CorrelatorKind.F1:
            lam, mu = off_axis(k), off_axis(k)
            spec = CorrelatorSpec(kind, lam=lam, mu=mu)
            general = corr_general(2 * k, 0, (), lam + mu, table, q)
        elif kind == CorrelatorKind.F3:
            eps, omega = off_axis(m), off_axis(m)
            spec = CorrelatorSpec(kind, eps=eps, omega=omega)
            general = corr_general(0, 2 * m, eps + omega, (), table, q)
        else:
            eps, mu = off_axis(m), off_axis(k)
            spec = CorrelatorSpec(kind, eps=eps, mu=mu)
            general = corr_general(k, m, eps, mu, table, q)
        assert value_of(spec, table, q) == pytest.approx(general.to_complex(), rel=RTOL)
