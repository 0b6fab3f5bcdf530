"""Options shared by every subcommand and the plumbing from flags to a RunConfig."""

from __future__ import annotations

import logging
from typing import Annotated, Any, Optional

import typer
from pydantic import ValidationError

from charpoly.models import EnsembleConfig, OutputFormat, Potential, QuadratureSpec, RunConfig
from charpoly.utils.complexparse import parse_complex_list, parse_float_list, parse_int_list
from charpoly.utils.reports import emit
from charpoly.utils.scaled import ScaledComplex

log = logging.getLogger(__name__)

COMPLEX_HELP = "Comma-separated complex literals such as 0.1+0.5i,-0.2-0.5i"

VCoeffs = Annotated[
    str,
    typer.Option(
        "--v-coeffs",
        help="Coefficients of x, x^2, ... in V, comma-separated (0,0.5 is V = x^2/2)",
    ),
]
EnsembleSize = Annotated[int, typer.Option("--n", min=1, help="Ensemble size N")]
Seed = Annotated[int, typer.Option("--seed", min=0, help="Master random seed")]
Tol = Annotated[float, typer.Option("--tol", help="Quadrature tolerance")]
Format = Annotated[OutputFormat, typer.Option("--format", help="Report format")]
Threads = Annotated[int, typer.Option("--threads", min=1, help="Worker threads")]
Out = Annotated[Optional[str], typer.Option("--out", help="Write the report here")]

DEFAULT_POTENTIAL = "0,0.5"
DEFAULT_N = 10


def resolve(
    command: str,
    v_coeffs: str,
    n: int,
    seed: int,
    tol: float,
    fmt: OutputFormat,
    threads: int,
    out: str | None,
    **params: Any,
) -> RunConfig:
    try:
        Potential.from_str(v_coeffs)
        return RunConfig(
            command=command,
            potential=v_coeffs,
            n=n,
            seed=seed,
            tol=tol,
            format=fmt,
            threads=threads,
            out=out,
            params=params,
        )
    except (ValidationError, ValueError) as ex:
        raise typer.BadParameter(str(ex)) from ex


def ensemble(run: RunConfig) -> EnsembleConfig:
    return EnsembleConfig(potential=Potential.from_str(run.potential), n=run.n)


def quadrature(run: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(tol=run.tol)


def complexes(text: str, flag: str) -> tuple[complex, ...]:
    try:
        return parse_complex_list(text)
    except ValueError as ex:
        raise typer.BadParameter(str(ex), param_hint=flag) from ex


def ints(text: str, flag: str) -> list[int]:
    try:
        return parse_int_list(text)
    except ValueError as ex:
        raise typer.BadParameter(str(ex), param_hint=flag) from ex


def floats(text: str, flag: str) -> list[float]:
    try:
        return parse_float_list(text)
    except ValueError as ex:
        raise typer.BadParameter(str(ex), param_hint=flag) from ex


SCALED_HEADER = ["log_mag", "phase_re", "phase_im"]


def scaled_columns(value: ScaledComplex) -> list[float]:
    """[log|value|, Re phase, Im phase], read off the scaled form without exponentiating."""
    return [value.log_mag, value.phase.real, value.phase.imag]


def finish(
    run: RunConfig,
    header: list[str],
    rows: list[list[Any]],
    extra: dict[str, Any] | None = None,
) -> None:
    text = emit(run, header, rows, extra)
    if run.out is None:
        typer.echo(text, nl=False)
