from typing import Annotated, Optional

import numpy as np
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
from charpoly.utils.ensemble import potential_eval
from charpoly.utils.equilibrium import (
    DensityMode,
    density_and_alpha,
    effective_potential_gap,
    finite_density,
    hilbert_transform,
    measure_for,
    normalization,
)
from charpoly.utils.orthopoly import build_recurrence

GAP_MULTIPLES = (1.2, 1.5, 2.0)


def monomial_coeffs(m: int, t: float) -> str:
    """Coefficient list of t x^(2m)."""
    return ",".join(["0"] * (2 * m - 1) + [repr(float(t))])


def equilibrium(
    m: Annotated[
        Optional[int], typer.Option("--m", min=1, help="Use V = t x^(2m) instead of --v-coeffs")
    ] = None,
    t: Annotated[float, typer.Option("--t", help="Coupling t of t x^(2m)")] = 1.0,
    grid: Annotated[int, typer.Option("--grid", min=2, help="Grid points on |x| <= 0.8a")] = 17,
    finite: Annotated[
        bool, typer.Option("--finite", help="Add K_N(x, x)/N at the given --n")
    ] = False,
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = DEFAULT_N,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.csv,
    threads: Threads = 1,
    out: Out = None,
):
    """Equilibrium density psi and tilt alpha of V = t x^(2m), with the
    Euler-Lagrange residual on the support and the effective-potential gap
    outside it."""
    if m is not None:
        if t <= 0:
            raise typer.BadParameter(f"--t must be positive, got {t}")
        v_coeffs = monomial_coeffs(m, t)
    run = resolve(
        "equilibrium", v_coeffs, n, seed, tol, fmt, threads, out, m=m, t=t, grid=grid, finite=finite
    )
    cfg = ensemble(run)
    meas = measure_for(cfg.potential)
    table = build_recurrence(cfg, n + 1, quadrature(run)) if finite else None
    rows = []
    for x in np.linspace(-0.8 * meas.a, 0.8 * meas.a, grid):
        x = float(x)
        _, derivative = potential_eval(cfg.potential, x)
        _, alpha = density_and_alpha(cfg, x, DensityMode.limit)
        residual = abs(hilbert_transform(meas, x) - derivative / (2 * np.pi))
        row = [x, float(meas.psi(x)), alpha, residual]
        if table is not None:
            row.append(finite_density(cfg, x, table))
        rows.append(row)
    extra = {
        "endpoint": meas.a,
        "normalization": normalization(meas),
        "gap": {
            f"{multiple}a": effective_potential_gap(meas, cfg.potential, multiple * meas.a)
            for multiple in GAP_MULTIPLES
        },
    }
    header = ["x", "psi", "alpha", "residual"] + (["kn_over_n"] if finite else [])
    finish(run, header, rows, extra)
