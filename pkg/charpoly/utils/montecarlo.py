"""Eigenvalue samplers for exp(-N sum V(x_i)) Delta^2 and a Monte-Carlo
estimator of characteristic-polynomial averages built on them.

Chains are seeded from SeedSequence([seed, chain]) and merged in chain order,
so an estimate depends on (cfg, spec, n_samples) only, never on the number of
worker threads.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from charpoly import config
from charpoly.models import EnsembleConfig, QuadratureSpec, SamplerMethod, SamplerSpec
from charpoly.utils.correlators import CorrelatorSpec
from charpoly.utils.ensemble import potential_eval
from charpoly.utils.equilibrium import finite_density
from charpoly.utils.errors import DegenerateConfig, UnsupportedPotential, VarianceGuardViolated
from charpoly.utils.orthopoly import build_recurrence
from charpoly.utils.scaled import ScaledComplex
from charpoly.utils.workers import map_ordered

log = logging.getLogger(__name__)

ACCEPTANCE_BAND = (0.2, 0.6)


@dataclass(frozen=True)
class ChainResult:
    chain: int
    samples: np.ndarray  # shape (count, N)
    acceptance_rate: float | None = None


@dataclass(frozen=True)
class MCEstimate:
    """mean and stderr are mantissas of the estimate times exp(log_scale)."""

    mean: complex
    stderr: float
    n_samples: int
    seed: int
    acceptance_rate: float | None = None
    log_scale: float = 0.0

    def scaled_mean(self) -> ScaledComplex:
        return ScaledComplex.from_complex(self.mean, self.log_scale)

    def to_dict(self) -> dict:
        return {
            "mean_re": self.mean.real,
            "mean_im": self.mean.imag,
            "stderr": self.stderr,
            "n": self.n_samples,
            "seed": self.seed,
            "acceptance": self.acceptance_rate,
            "log_scale": self.log_scale,
        }


def chain_rng(seed: int, chain: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, chain]))


def split_counts(n_samples: int, chains: int) -> list[int]:
    base, extra = divmod(n_samples, chains)
    return [base + (1 if c < extra else 0) for c in range(chains)]


def _quadratic_scale(cfg: EnsembleConfig) -> float:
    monomial = cfg.potential.monomial()
    if monomial is None or monomial[0] != 1:
        raise UnsupportedPotential(
            f"Direct sampling needs V = c x^2; got {cfg.potential.to_str()}"
        )
    return monomial[1]


def _direct_chain(cfg: EnsembleConfig, spec: SamplerSpec, chain: int, count: int) -> ChainResult:
    c = _quadratic_scale(cfg)
    n = cfg.n
    sigma = 1.0 / math.sqrt(2.0 * n * c)
    rng = chain_rng(spec.seed, chain)
    parts = []
    remaining = count
    while remaining > 0:
        batch = min(remaining, config.MC_DIRECT_BATCH)
        g = rng.standard_normal((batch, n, n)) + 1j * rng.standard_normal((batch, n, n))
        h = 0.5 * sigma * (g + np.conj(np.swapaxes(g, 1, 2)))
        parts.append(np.linalg.eigvalsh(h))
        remaining -= batch
    samples = np.concatenate(parts) if parts else np.empty((0, n))
    return ChainResult(chain=chain, samples=samples)


def _site_delta(cfg: EnsembleConfig, x: np.ndarray, i: int, proposal: np.ndarray):
    """Log-density change of moving site i to proposal, for every walker at once,
    and a mask of proposals that land on another eigenvalue."""
    others = np.delete(x, i, axis=1)
    old_gap = np.abs(x[:, i, None] - others)
    new_gap = np.abs(proposal[:, None] - others)
    v_new, _ = potential_eval(cfg.potential, proposal)
    v_old, _ = potential_eval(cfg.potential, x[:, i])
    with np.errstate(divide="ignore", invalid="ignore"):
        repulsion = 2.0 * np.sum(np.log(new_gap) - np.log(old_gap), axis=1)
    delta = -cfg.n * (v_new - v_old) + repulsion
    if others.shape[1] == 0:
        return delta, np.zeros(len(proposal), dtype=bool)
    return delta, np.min(new_gap, axis=1) < config.MC_MIN_SEPARATION


def propose_site(
    cfg: EnsembleConfig, x: np.ndarray, i: int, step: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian proposals for site i of every walker with their log-density changes.
    Walkers whose proposal lands on another eigenvalue draw again."""
    walkers = x.shape[0]
    proposal = x[:, i] + step * rng.standard_normal(walkers)
    delta, collided = _site_delta(cfg, x, i, proposal)
    for _ in range(config.MC_MAX_REPROPOSALS):
        if not collided.any():
            return proposal, delta
        redo = np.flatnonzero(collided)
        proposal[redo] = x[redo, i] + step * rng.standard_normal(len(redo))
        delta, collided = _site_delta(cfg, x, i, proposal)
    if collided.any():
        raise DegenerateConfig(
            f"Site {i} collided with another eigenvalue in {int(collided.sum())} walkers"
            f" after {config.MC_MAX_REPROPOSALS} proposals"
        )
    return proposal, delta


def _sweep(
    cfg: EnsembleConfig, x: np.ndarray, step: float, rng: np.random.Generator
) -> float:
    """One single-site update of every eigenvalue in every walker; returns the
    accepted fraction."""
    walkers, n = x.shape
    accepted = 0
    for i in range(n):
        proposal, delta = propose_site(cfg, x, i, step, rng)
        u = rng.random(walkers)
        accept = np.log(u) < delta
        x[accept, i] = proposal[accept]
        accepted += int(np.count_nonzero(accept))
    return accepted / (walkers * n)


def _metropolis_chain(
    cfg: EnsembleConfig, spec: SamplerSpec, chain: int, count: int
) -> ChainResult:
    n = cfg.n
    rng = chain_rng(spec.seed, chain)
    walkers = spec.walkers
    x = np.tile(np.linspace(-1.0, 1.0, n), (walkers, 1))
    x += 0.01 * rng.standard_normal((walkers, n))
    log_step = math.log(spec.step)
    for sweep in range(spec.burn_in):
        rate = _sweep(cfg, x, math.exp(log_step), rng)
        log_step += (rate - config.MC_TARGET_ACCEPTANCE) / math.sqrt(sweep + 1.0)
    step = math.exp(log_step)
    log.debug("Chain %d tuned step %.4g after %d sweeps", chain, step, spec.burn_in)

    recorded = []
    rates = []
    total = 0
    while total < count:
        for _ in range(spec.thinning):
            rates.append(_sweep(cfg, x, step, rng))
        recorded.append(x.copy())
        total += walkers
    samples = np.concatenate(recorded)[:count] if recorded else np.empty((0, n))
    acceptance = float(np.mean(rates)) if rates else None
    if acceptance is not None and not ACCEPTANCE_BAND[0] <= acceptance <= ACCEPTANCE_BAND[1]:
        log.warning(
            "Chain %d acceptance %.3f is outside [%.1f, %.1f] after tuning",
            chain,
            acceptance,
            *ACCEPTANCE_BAND,
        )
    return ChainResult(chain=chain, samples=samples, acceptance_rate=acceptance)


def run_chains(
    cfg: EnsembleConfig, spec: SamplerSpec, n_samples: int, threads: int = 1
) -> list[ChainResult]:
    if spec.method == SamplerMethod.gaussian_direct:
        _quadratic_scale(cfg)
        runner = _direct_chain
    else:
        runner = _metropolis_chain
    work = [(c, count) for c, count in enumerate(split_counts(n_samples, spec.chains)) if count]
    log.info(
        "Sampling %d spectra of size %d with %s over %d chains",
        n_samples,
        cfg.n,
        spec.method.value,
        len(work),
    )
    return map_ordered(lambda item: runner(cfg, spec, item[0], item[1]), work, threads)


def sample_spectrum(
    cfg: EnsembleConfig, spec: SamplerSpec, n_samples: int, threads: int = 1
) -> Iterator[np.ndarray]:
    """Batches of eigenvalue vectors, shape (batch, N), in chain order."""
    for result in run_chains(cfg, spec, n_samples, threads):
        for start in range(0, len(result.samples), config.MC_DIRECT_BATCH):
            yield result.samples[start : start + config.MC_DIRECT_BATCH]


def check_variance_guard(
    cfg: EnsembleConfig, corr: CorrelatorSpec, q: QuadratureSpec | None = None
) -> None:
    denominators = corr.denominators()
    if not denominators:
        return
    table = build_recurrence(cfg, cfg.n + 1, q)
    for eps in denominators:
        rho = finite_density(cfg, eps.real, table, q)
        threshold = config.MC_VARIANCE_GUARD / (cfg.n * rho)
        if abs(eps.imag) < threshold:
            raise VarianceGuardViolated(
                f"|Im eps| = {abs(eps.imag):.3g} is below {threshold:.3g} at eps={eps};"
                " the inverse-moment estimator would be dominated by its tail"
            )


def log_observable(samples: np.ndarray, corr: CorrelatorSpec) -> np.ndarray:
    """log prod Z(mu_l) - log prod Z(eps_j) per sample, with Z(z) = prod (z - x_i)."""
    total = np.zeros(len(samples), dtype=complex)
    for mu in corr.numerators():
        total += np.sum(np.log(mu - samples.astype(complex)), axis=1)
    for eps in corr.denominators():
        total -= np.sum(np.log(eps - samples.astype(complex)), axis=1)
    return total


def batch_means(values: np.ndarray, batches: int = config.MC_BATCHES) -> tuple[complex, float]:
    mean = complex(np.mean(values))
    count = min(batches, len(values))
    if count < 2:
        return mean, 0.0
    means = np.array([np.mean(part) for part in np.array_split(values, count)])
    spread = np.sum(np.abs(means - mean) ** 2) / (count - 1)
    return mean, float(math.sqrt(spread / count))


def estimate_correlator(
    cfg: EnsembleConfig,
    spec: SamplerSpec,
    corr: CorrelatorSpec,
    n_samples: int,
    threads: int = 1,
    q: QuadratureSpec | None = None,
) -> MCEstimate:
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    check_variance_guard(cfg, corr, q)
    results = run_chains(cfg, spec, n_samples, threads)
    logs = np.concatenate([log_observable(r.samples, corr) for r in results])
    shift = float(np.max(logs.real)) if len(logs) else 0.0
    mean, stderr = batch_means(np.exp(logs - shift))
    if shift > config.MC_MAX_LOG_SCALE:
        log_scale, factor = shift, 1.0
    else:
        log_scale, factor = 0.0, math.exp(shift)
    rates = [r.acceptance_rate for r in results if r.acceptance_rate is not None]
    estimate = MCEstimate(
        mean=mean * factor,
        stderr=stderr * factor,
        n_samples=n_samples,
        seed=spec.seed,
        acceptance_rate=float(np.mean(rates)) if rates else None,
        log_scale=log_scale,
    )
    log.info(
        "MC estimate %s = (%.10g%+.10gi +- %.3g) * exp(%.6g)",
        corr.kind.value,
        estimate.mean.real,
        estimate.mean.imag,
        estimate.stderr,
        estimate.log_scale,
    )
    return estimate
