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
    finish,
    resolve,
)
from charpoly.models import OutputFormat
from charpoly.utils.errors import ToleranceBreached
from charpoly.utils.identities import Suite, run_suite


def identities(
    suite: Annotated[Suite, typer.Option("--suite")] = Suite.all,
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = DEFAULT_N,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.json,
    threads: Threads = 1,
    out: Out = None,
):
    """Brute-force residuals of the interpolation, partition, Schur and
    double-permutation identities."""
    run = resolve("identities", v_coeffs, n, seed, tol, fmt, threads, out, suite=suite.value)
    results = run_suite(suite, seed, threads)
    header = ["name", "residual", "term_count", "term_scale", "bound", "ok"]
    rows = [[r.name, r.residual, r.term_count, r.term_scale, r.bound, r.ok] for r in results]
    finish(run, header, rows, {"passed": all(r.ok for r in results)})
    failed = [r.name for r in results if not r.ok]
    if failed:
        raise ToleranceBreached(f"Residual above bound for {', '.join(failed)}")
