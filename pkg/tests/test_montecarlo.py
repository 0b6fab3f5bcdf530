import numpy as np
import pytest
from scipy import stats

from charpoly.models import EnsembleConfig, Potential, SamplerMethod, SamplerSpec
from charpoly.utils.correlators import CorrelatorKind, CorrelatorSpec, evaluate, moment_negative
from charpoly.utils.errors import DegenerateConfig, UnsupportedPotential, VarianceGuardViolated
from charpoly.utils.montecarlo import (
    ACCEPTANCE_BAND,
    batch_means,
    estimate_correlator,
    propose_site,
    run_chains,
    sample_spectrum,
    split_counts,
)

QUARTIC = Potential(coeffs=(0.0, 0.0, 0.0, 1.0))
SAMPLES = 100_000

ORACLE_CASES = [
    CorrelatorSpec(CorrelatorKind.GENERAL, mu=(0.3 + 0.2j,)),
    CorrelatorSpec(CorrelatorKind.F1, lam=(0.3 + 0.2j,), mu=(-0.4 + 0.1j,)),
    CorrelatorSpec(CorrelatorKind.GENERAL, eps=(0.2 + 0.5j,)),
    CorrelatorSpec(CorrelatorKind.F2, mu=(0.1 - 0.3j,), eps=(-0.2 + 0.6j,)),
    CorrelatorSpec(CorrelatorKind.F3, eps=(0.1 + 0.6j,), omega=(-0.2 - 0.6j,)),
    CorrelatorSpec(
        CorrelatorKind.F4, mu=(0.3 + 0.2j, -0.4 + 0.1j, 0.1 - 0.2j), eps=(0.2 + 0.5j,)
    ),
    CorrelatorSpec(
        CorrelatorKind.F5, mu=(0.1 - 0.3j,), eps=(0.2 + 0.5j, -0.3 - 0.6j, 0.1 + 0.7j)
    ),
]


@pytest.mark.slow
@pytest.mark.parametrize(
    "corr", ORACLE_CASES, ids=["z", "zz", "inv", "ratio", "inv-pair", "f4-3-1", "f5-1-3"]
)
def test_direct_sampler_agrees_with_exact_values(small_cfg, small_table, q, corr):
    estimate = estimate_correlator(small_cfg, SamplerSpec(), corr, SAMPLES, q=q)
    exact = evaluate(corr, small_table, q).to_complex()
    assert abs(estimate.mean - exact) <= 3 * estimate.stderr


def test_estimates_are_reproducible_and_thread_independent(small_cfg, q):
    corr = CorrelatorSpec(CorrelatorKind.F2, mu=(0.2,), eps=(0.1 + 0.5j,))
    spec = SamplerSpec(seed=7)
    first = estimate_correlator(small_cfg, spec, corr, 4000, threads=1, q=q)
    again = estimate_correlator(small_cfg, spec, corr, 4000, threads=1, q=q)
    threaded = estimate_correlator(small_cfg, spec, corr, 4000, threads=4, q=q)
    assert first == again
    assert first.mean == threaded.mean and first.stderr == threaded.stderr
    other = estimate_correlator(small_cfg, SamplerSpec(seed=8), corr, 4000, q=q)
    assert other.mean != first.mean


def test_empty_product_is_one(small_cfg):
    empty = CorrelatorSpec(CorrelatorKind.GENERAL)
    estimate = estimate_correlator(small_cfg, SamplerSpec(), empty, 500)
    assert estimate.mean == pytest.approx(1.0)
    assert estimate.stderr == 0.0
    assert estimate.to_dict()["n"] == 500


def test_direct_second_moment():
    cfg = EnsembleConfig(potential=Potential(coeffs=(0.0, 1.0)), n=7)
    samples = np.concatenate(list(sample_spectrum(cfg, SamplerSpec(), 20_000)))
    assert samples.shape == (20_000, 7)
    # E tr H^2 / N = 1/2 for V = x^2 at every N
    assert np.mean(samples**2) == pytest.approx(0.5, rel=0.02)


@pytest.mark.slow
def test_negative_moment_against_the_direct_sampler(small_cfg, small_table, q):
    result = moment_negative(0.0, 1.0, 1, small_cfg, small_table, q)
    corr = CorrelatorSpec(CorrelatorKind.GENERAL, eps=(result.offset, -result.offset))
    estimate = estimate_correlator(small_cfg, SamplerSpec(seed=3), corr, SAMPLES, q=q)
    assert abs(estimate.mean - result.exact.to_complex()) <= 3 * estimate.stderr


@pytest.mark.slow
def test_metropolis_matches_direct_sampler(small_cfg):
    reference = np.concatenate([r.samples for r in run_chains(small_cfg, SamplerSpec(), 100_000)])
    metropolis_spec = SamplerSpec(method=SamplerMethod.metropolis_loggas, seed=11, thinning=20)
    gas = np.concatenate([r.samples for r in run_chains(small_cfg, metropolis_spec, 10_000)])
    assert gas.shape == (10_000, small_cfg.n)
    # 20 bins of equal probability under the direct sampler
    reference_max, gas_max = np.max(reference, axis=1), np.max(gas, axis=1)
    inner = np.quantile(reference_max, np.linspace(0.0, 1.0, 21)[1:-1])
    observed = np.bincount(np.searchsorted(inner, gas_max), minlength=20)
    expected = np.bincount(np.searchsorted(inner, reference_max), minlength=20)
    expected = expected * (len(gas) / len(reference))
    assert stats.chisquare(observed, expected).pvalue > 0.01
    # V is even, so the spectrum is symmetric about 0
    assert np.mean(gas) == pytest.approx(0.0, abs=0.02)
    levels = [0.25, 0.5, 0.75]
    np.testing.assert_allclose(
        np.quantile(-np.min(gas, axis=1), levels), np.quantile(gas_max, levels), atol=0.03
    )


def test_metropolis_acceptance_stays_in_band():
    cfg = EnsembleConfig(potential=QUARTIC, n=5)
    spec = SamplerSpec(method=SamplerMethod.metropolis_loggas, burn_in=300, walkers=32)
    for chain in run_chains(cfg, spec, 2000):
        assert ACCEPTANCE_BAND[0] <= chain.acceptance_rate <= ACCEPTANCE_BAND[1]
        assert np.all(np.isfinite(chain.samples))


def test_direct_sampler_refuses_non_quadratic_potentials():
    cfg = EnsembleConfig(potential=QUARTIC, n=5)
    with pytest.raises(UnsupportedPotential):
        run_chains(cfg, SamplerSpec(), 10)


def test_variance_guard(small_cfg, q):
    corr = CorrelatorSpec(CorrelatorKind.GENERAL, eps=(0.1 + 1e-3j,))
    with pytest.raises(VarianceGuardViolated):
        estimate_correlator(small_cfg, SamplerSpec(), corr, 100, q=q)


def test_split_counts_and_batch_means():
    assert split_counts(10, 4) == [3, 3, 2, 2]
    mean, stderr = batch_means(np.ones(40))
    assert mean == 1.0 and stderr == 0.0
    mean, stderr = batch_means(np.arange(40.0), batches=4)
    assert mean == pytest.approx(19.5)
    assert stderr > 0


def test_collisions_are_reproposed_then_refused():
    cfg = EnsembleConfig(potential=Potential(coeffs=(0.0, 0.5)), n=3)
    rng = np.random.default_rng(0)
    x = np.array([[0.0, 0.5, 1.0], [0.2, 0.6, 1.0]])
    proposal, delta = propose_site(cfg, x, 0, 0.1, rng)
    assert proposal.shape == (2,) and np.all(np.isfinite(delta))
    with pytest.raises(DegenerateConfig):
        # a zero step keeps landing on the neighbour
        propose_site(cfg, np.array([[0.0, 0.0, 1.0]]), 0, 0.0, rng)


def test_huge_averages_keep_their_log_scale(small_cfg):
    corr = CorrelatorSpec(CorrelatorKind.GENERAL, mu=(1e60,))
    estimate = estimate_correlator(small_cfg, SamplerSpec(), corr, 200)
    assert estimate.log_scale > 709
    assert estimate.to_dict()["log_scale"] == estimate.log_scale
    value = estimate.scaled_mean()
    assert value.log_mag == pytest.approx(6 * np.log(1e60), rel=1e-12)
    assert value.phase == pytest.approx(1.0)
