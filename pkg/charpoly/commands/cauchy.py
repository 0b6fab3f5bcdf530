from typing import Annotated

import typer

from charpoly import config
from charpoly.commands.common import (
    COMPLEX_HELP,
    DEFAULT_N,
    SCALED_HEADER,
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
    ints,
    quadrature,
    resolve,
    scaled_columns,
)
from charpoly.models import OutputFormat
from charpoly.utils.cauchy import cauchy_batch
from charpoly.utils.orthopoly import build_recurrence


def cauchy(
    eps: Annotated[str, typer.Option("--eps", help=COMPLEX_HELP)],
    k: Annotated[str, typer.Option("--k", help="Indices k, comma-separated")] = "0",
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = DEFAULT_N,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.csv,
    threads: Threads = 1,
    out: Out = None,
):
    """Cauchy transforms h_k(eps) off the real axis."""
    run = resolve("cauchy", v_coeffs, n, seed, tol, fmt, threads, out, k=k, eps=eps)
    ks = ints(k, "--k")
    points = complexes(eps, "--eps")
    if not ks or not points or min(ks) < 0:
        raise typer.BadParameter("need at least one index k >= 0 and one eps")
    cfg = ensemble(run)
    q = quadrature(run)
    table = build_recurrence(cfg, max(ks) + 1, q)
    values = cauchy_batch(table, cfg, ks, list(points), q)
    rows = []
    for i, kk in enumerate(ks):
        for j, z in enumerate(points):
            rows.append([kk, z.real, z.imag, *scaled_columns(values[i][j])])
    finish(run, ["k", "eps_re", "eps_im", *SCALED_HEADER], rows)
