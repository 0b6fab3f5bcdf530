from typing import Annotated

import typer

from charpoly import config
from charpoly.commands.common import (
    COMPLEX_HELP,
    DEFAULT_N,
    DEFAULT_POTENTIAL,
    EnsembleSize,
    Format,
    Out,
    Seed,
    Threads,
    Tol,
    VCoeffs,
    complexes,
    ensemble,
    finish,
    quadrature,
    resolve,
)
from charpoly.models import OutputFormat
from charpoly.utils.complexparse import format_complex
from charpoly.utils.correlators import CorrelatorKind, CorrelatorSpec, F1Form, evaluate_config
from charpoly.utils.errors import InvalidCorrelatorSpec

Lam = Annotated[str, typer.Option("--lam", help="F1 first numerator vector. " + COMPLEX_HELP)]
Mu = Annotated[str, typer.Option("--mu", help="Numerator arguments. " + COMPLEX_HELP)]
Eps = Annotated[str, typer.Option("--eps", help="Denominator arguments. " + COMPLEX_HELP)]
Omega = Annotated[str, typer.Option("--omega", help="F3 second denominator vector. " + COMPLEX_HELP)]


def correlator_spec(kind: CorrelatorKind, lam: str, mu: str, eps: str, omega: str) -> CorrelatorSpec:
    try:
        return CorrelatorSpec(
            kind=kind,
            lam=complexes(lam, "--lam"),
            mu=complexes(mu, "--mu"),
            eps=complexes(eps, "--eps"),
            omega=complexes(omega, "--omega"),
        )
    except InvalidCorrelatorSpec as ex:
        raise typer.BadParameter(str(ex)) from ex


def spec_args(spec: CorrelatorSpec) -> dict[str, list[str]]:
    vectors = {"lam": spec.lam, "mu": spec.mu, "eps": spec.eps, "omega": spec.omega}
    return {name: [format_complex(v) for v in values] for name, values in vectors.items() if values}


def corr(
    kind: Annotated[CorrelatorKind, typer.Option("--kind", help="Correlation function")],
    lam: Lam = "",
    mu: Mu = "",
    eps: Eps = "",
    omega: Omega = "",
    form: Annotated[F1Form, typer.Option("--form", help="F1 representation")] = F1Form.kernel,
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = DEFAULT_N,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.csv,
    threads: Threads = 1,
    out: Out = None,
):
    """Exact finite-N average of products and ratios of characteristic polynomials."""
    run = resolve(
        "corr",
        v_coeffs,
        n,
        seed,
        tol,
        fmt,
        threads,
        out,
        kind=kind.value,
        lam=lam,
        mu=mu,
        eps=eps,
        omega=omega,
        form=form.value,
    )
    spec = correlator_spec(kind, lam, mu, eps, omega)
    value = evaluate_config(spec, ensemble(run), quadrature(run), threads, form)
    rows = [[kind.value, n, spec_args(spec), value.log_mag, value.phase]]
    finish(run, ["kind", "n", "args", "value_log_mag", "value_phase"], rows)
