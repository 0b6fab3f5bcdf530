import logging
from enum import Enum
from typing import Annotated

import numpy as np
import typer

from charpoly import config
from charpoly.commands.common import (
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
    floats,
    ints,
    quadrature,
    resolve,
)
from charpoly.models import OutputFormat
from charpoly.utils.correlators import moment_negative, moment_positive, upsilon_plus
from charpoly.utils.orthopoly import build_recurrence

log = logging.getLogger(__name__)


class MomentSign(str, Enum):
    positive = "positive"
    negative = "negative"


def moments(
    sign: Annotated[MomentSign, typer.Option("--sign")] = MomentSign.positive,
    k: Annotated[str, typer.Option("--k", help="Moment orders K, comma-separated")] = "1,2",
    x: Annotated[float, typer.Option("--x", help="Bulk point")] = 0.0,
    delta: Annotated[
        str, typer.Option("--delta", help="Distances from the axis in mean spacings")
    ] = "0.2,0.5,1,2",
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = 100,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.csv,
    threads: Threads = 1,
    out: Out = None,
):
    """Moments of |Z_N| at a bulk point against their universal large-N form."""
    orders = ints(k, "--k")
    deltas = floats(delta, "--delta")
    if not orders:
        raise typer.BadParameter("need at least one K", param_hint="--k")
    run = resolve(
        "moments", v_coeffs, n, seed, tol, fmt, threads, out, sign=sign.value, k=orders, x=x, delta=deltas
    )
    cfg = ensemble(run)
    q = quadrature(run)
    table = build_recurrence(cfg, n + 2 * max(orders) + 1, q)
    if sign == MomentSign.positive:
        rows = []
        for order in orders:
            result = moment_positive(x, order, cfg, table, q)
            rows.append(
                [
                    order,
                    x,
                    result.exact.log_mag,
                    result.asymptotic.log_mag,
                    result.universal_ratio,
                    upsilon_plus(order),
                ]
            )
        header = ["k", "x", "exact_log", "asymptotic_log", "universal_ratio", "upsilon"]
        finish(run, header, rows)
        return
    if not deltas or min(deltas) <= 0:
        raise typer.BadParameter("need positive distances", param_hint="--delta")
    rows = []
    slopes = {}
    for order in orders:
        logs = []
        for d in deltas:
            result = moment_negative(x, d, order, cfg, table, q)
            ratio = (result.exact / result.asymptotic).to_complex().real
            logs.append(result.exact.log_mag)
            rows.append([order, x, d, result.exact.log_mag, result.asymptotic.log_mag, ratio])
        if len(deltas) >= 2:
            slope, _ = np.polyfit(np.log(deltas), logs, 1)
            slopes[str(order)] = float(slope)
            log.info("K=%d: fitted slope %.4f against -K^2 = %d", order, slope, -order * order)
    header = ["k", "x", "delta", "exact_log", "asymptotic_log", "ratio"]
    finish(run, header, rows, {"slopes": slopes})
