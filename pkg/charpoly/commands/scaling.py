import logging
import math
from enum import Enum
from typing import Annotated, Optional

import typer

from charpoly import config
from charpoly.commands.common import (
    COMPLEX_HELP,
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
)
from charpoly.models import OutputFormat
from charpoly.utils.asymptotics import (
    ScalingPoint,
    convergence_study,
    two_point_resolvent,
    two_point_resolvent_finite,
    two_point_resolvent_verify,
)
from charpoly.utils.correlators import CorrelatorKind
from charpoly.utils.errors import ToleranceBreached

log = logging.getLogger(__name__)

# zeta, eta offsets used when the flags are left empty
DEFAULT_OFFSETS = {
    CorrelatorKind.F1: ("0.2", "0.7"),
    CorrelatorKind.F2: ("0.3+0.5i", "0.1"),
    CorrelatorKind.F3: ("0.3+0.5i", "-0.2-0.5i"),
}
TWO_POINT_DEFAULT = "0.1+0.4i,0.5-0.3i"


class ScalingMode(str, Enum):
    convergence = "convergence"
    two_point = "two-point"


def scaling(
    kind: Annotated[
        CorrelatorKind, typer.Option("--kind", help="Correlation function")
    ] = CorrelatorKind.F2,
    mode: Annotated[ScalingMode, typer.Option("--mode")] = ScalingMode.convergence,
    x: Annotated[float, typer.Option("--x", help="Bulk point")] = 0.0,
    zeta: Annotated[str, typer.Option("--zeta", help="First offsets. " + COMPLEX_HELP)] = "",
    eta: Annotated[str, typer.Option("--eta", help="Second offsets. " + COMPLEX_HELP)] = "",
    n_list: Annotated[str, typer.Option("--n-list", help="Ensemble sizes, ascending")] = "20,40,80",
    limit_density: Annotated[
        bool,
        typer.Option("--limit-density", help="Scale arguments with psi(x) instead of K_N(x,x)/N"),
    ] = False,
    min_order: Annotated[
        Optional[float],
        typer.Option("--min-order", help="Fail when the fitted order falls below this"),
    ] = None,
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = 100,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.csv,
    threads: Threads = 1,
    out: Out = None,
):
    """Exact correlators in Dyson scaling against their universal limits."""
    sizes = ints(n_list, "--n-list")
    if not sizes or min(sizes) < 1:
        raise typer.BadParameter("need at least one positive N", param_hint="--n-list")
    if mode == ScalingMode.two_point:
        eta = eta or TWO_POINT_DEFAULT
    elif not zeta and not eta:
        if kind not in DEFAULT_OFFSETS:
            raise typer.BadParameter(f"{kind.value} needs explicit --zeta and --eta offsets")
        zeta, eta = DEFAULT_OFFSETS[kind]
    run = resolve(
        "scaling",
        v_coeffs,
        n,
        seed,
        tol,
        fmt,
        threads,
        out,
        kind=kind.value,
        mode=mode.value,
        x=x,
        zeta=zeta,
        eta=eta,
        n_list=sizes,
        limit_density=limit_density,
        min_order=min_order,
    )
    cfg = ensemble(run)
    q = quadrature(run)
    template = ScalingPoint(x=x, zeta=complexes(zeta, "--zeta"), eta=complexes(eta, "--eta"), n=sizes[0])
    if mode == ScalingMode.two_point:
        rows = []
        for size in sizes:
            pt = template.with_n(size)
            closed = two_point_resolvent(pt, cfg.potential)
            verify = two_point_resolvent_verify(pt, cfg.potential, q=q)
            finite = two_point_resolvent_finite(pt, cfg.potential, q=q)
            rows.append(
                [
                    size,
                    closed.real,
                    closed.imag,
                    verify.real,
                    verify.imag,
                    finite.real,
                    finite.imag,
                    abs(verify - closed) / abs(closed),
                    abs(finite - closed) / abs(closed),
                ]
            )
        header = [
            "n",
            "closed_re",
            "closed_im",
            "verify_re",
            "verify_im",
            "finite_re",
            "finite_im",
            "verify_rel_err",
            "finite_rel_err",
        ]
        finish(run, header, rows)
        return
    study = convergence_study(
        kind, template, cfg.potential, sizes, q, threads, finite_scaling=not limit_density
    )
    rows = [[row.n, row.abs_err, row.rel_err] for row in study.rows]
    finish(run, ["n", "abs_err", "rel_err"], rows, {"fitted_order": study.order})
    if min_order is not None and not study.order >= min_order:
        raise ToleranceBreached(
            f"Fitted convergence order {study.order:.3f} is below {min_order}"
            + ("" if math.isfinite(study.order) else " (fewer than two usable sizes)")
        )
