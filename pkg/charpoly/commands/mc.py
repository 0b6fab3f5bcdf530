import logging
import math
from typing import Annotated

import typer

from charpoly import config
from charpoly.commands.common import (
    DEFAULT_N,
    DEFAULT_POTENTIAL,
    EnsembleSize,
    Format,
    Out,
    Seed,
    Threads,
    Tol,
    VCoeffs,
    ensemble,
    finish,
    quadrature,
    resolve,
)
from charpoly.commands.corr import Eps, Lam, Mu, Omega, correlator_spec
from charpoly.models import OutputFormat, SamplerMethod, SamplerSpec
from charpoly.utils.correlators import CorrelatorKind, evaluate_config
from charpoly.utils.errors import ToleranceBreached
from charpoly.utils.montecarlo import estimate_correlator

log = logging.getLogger(__name__)

COMPARE_SIGMAS = 3.0


def mc(
    corr_kind: Annotated[
        CorrelatorKind, typer.Option("--corr", help="Correlation function to estimate")
    ] = CorrelatorKind.GENERAL,
    lam: Lam = "",
    mu: Mu = "",
    eps: Eps = "",
    omega: Omega = "",
    samples: Annotated[int, typer.Option("--samples", min=1)] = 100_000,
    method: Annotated[SamplerMethod, typer.Option("--method")] = SamplerMethod.gaussian_direct,
    burn_in: Annotated[int, typer.Option("--burn-in", min=0)] = 200,
    thinning: Annotated[int, typer.Option("--thinning", min=1)] = 5,
    step: Annotated[float, typer.Option("--step")] = 0.2,
    chains: Annotated[int, typer.Option("--chains", min=1)] = 4,
    walkers: Annotated[int, typer.Option("--walkers", min=1)] = 64,
    compare: Annotated[
        bool,
        typer.Option("--compare", help="Also evaluate the exact value and fail beyond 3 sigma"),
    ] = False,
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = DEFAULT_N,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.json,
    threads: Threads = 1,
    out: Out = None,
):
    """Monte-Carlo estimate of a correlation function from sampled spectra."""
    run = resolve(
        "mc",
        v_coeffs,
        n,
        seed,
        tol,
        fmt,
        threads,
        out,
        corr=corr_kind.value,
        lam=lam,
        mu=mu,
        eps=eps,
        omega=omega,
        samples=samples,
        method=method.value,
        burn_in=burn_in,
        thinning=thinning,
        step=step,
        chains=chains,
        walkers=walkers,
        compare=compare,
    )
    try:
        sampler = SamplerSpec(
            method=method,
            burn_in=burn_in,
            thinning=thinning,
            step=step,
            seed=seed,
            chains=chains,
            walkers=walkers,
        )
    except ValueError as ex:
        raise typer.BadParameter(str(ex)) from ex
    spec = correlator_spec(corr_kind, lam, mu, eps, omega)
    cfg = ensemble(run)
    q = quadrature(run)
    estimate = estimate_correlator(cfg, sampler, spec, samples, threads, q)
    result = estimate.to_dict()
    header = list(result)
    row = [result[key] for key in header]
    breach = None
    if compare:
        # compared at the estimate's scale
        exact = evaluate_config(spec, cfg, q, threads).scale(-estimate.log_scale).to_complex()
        distance = abs(estimate.mean - exact)
        if estimate.stderr > 0:
            z_score = distance / estimate.stderr
        else:
            z_score = 0.0 if distance == 0 else math.inf
        header += ["exact_re", "exact_im", "z"]
        row += [exact.real, exact.imag, z_score]
        if z_score > COMPARE_SIGMAS:
            breach = f"Monte-Carlo mean is {z_score:.2f} standard errors from the exact value"
    finish(run, header, [row])
    if breach is not None:
        raise ToleranceBreached(breach)
