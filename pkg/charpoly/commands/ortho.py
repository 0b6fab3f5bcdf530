import logging
from typing import Annotated, Optional

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
from charpoly.models import OutputFormat
from charpoly.utils.orthopoly import build_recurrence, orthogonality_residual

log = logging.getLogger(__name__)


def ortho(
    k_max: Annotated[
        Optional[int], typer.Option("--k-max", min=1, help="Table depth (default N + 1)")
    ] = None,
    residual: Annotated[
        bool, typer.Option("--residual", help="Also report the orthogonality residual")
    ] = False,
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = DEFAULT_N,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.csv,
    threads: Threads = 1,
    out: Out = None,
):
    """Recurrence coefficients a_k, b_k and log c_k^2 of the monic family."""
    depth = k_max if k_max is not None else n + 1
    run = resolve("ortho", v_coeffs, n, seed, tol, fmt, threads, out, k_max=depth, residual=residual)
    q = quadrature(run)
    table = build_recurrence(ensemble(run), depth, q)
    extra = {"truncation": table.truncation, "panels": table.panels}
    if residual:
        extra["orthogonality_residual"] = orthogonality_residual(table, q)
        log.info("Orthogonality residual %.3e", extra["orthogonality_residual"])
    rows = [list(row) for row in table.to_rows()]
    finish(run, ["k", "a", "b", "log_c2"], rows, extra)
