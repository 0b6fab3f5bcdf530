from enum import Enum
from typing import Annotated

import typer

from charpoly import config
from charpoly.commands.common import (
    COMPLEX_HELP,
    DEFAULT_N,
    DEFAULT_POTENTIAL,
    SCALED_HEADER,
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
    scaled_columns,
)
from charpoly.models import OutputFormat
from charpoly.utils.kernels import (
    KernelFamily,
    KernelKind,
    kernel_kn,
    kernel_value,
    kernel_w1_cd,
    limit_kernel,
)
from charpoly.utils.orthopoly import build_recurrence
from charpoly.utils.scaled import ScaledComplex


class KernelChoice(str, Enum):
    w1 = "w1"
    w2 = "w2"
    w3 = "w3"
    kn = "kn"
    s1 = "s1"
    s2 = "s2"
    s3 = "s3"


FAMILIES = {
    KernelChoice.w1: KernelFamily.I,
    KernelChoice.w2: KernelFamily.II,
    KernelChoice.w3: KernelFamily.III,
    KernelChoice.kn: KernelFamily.I,
    KernelChoice.s1: KernelFamily.I,
    KernelChoice.s2: KernelFamily.II,
    KernelChoice.s3: KernelFamily.III,
}
LIMITS = {KernelChoice.s1, KernelChoice.s2, KernelChoice.s3}


def argument_pairs(text: str) -> list[tuple[complex, complex]]:
    values = complexes(text, "--args")
    if not values or len(values) % 2:
        raise typer.BadParameter("--args needs a nonempty list of pairs a1,b1,a2,b2,...")
    return list(zip(values[::2], values[1::2]))


def kernel(
    kind: Annotated[KernelChoice, typer.Option("--kind", help="Kernel to evaluate")],
    args: Annotated[str, typer.Option("--args", help="Argument pairs a1,b1,a2,b2,... " + COMPLEX_HELP)],
    shift: Annotated[int, typer.Option("--shift", help="Kernel index is N plus this shift")] = 0,
    christoffel_darboux: Annotated[
        bool, typer.Option("--christoffel-darboux", help="w1 through the summed form")
    ] = False,
    v_coeffs: VCoeffs = DEFAULT_POTENTIAL,
    n: EnsembleSize = DEFAULT_N,
    seed: Seed = config.DEFAULT_SEED,
    tol: Tol = config.QUADRATURE_TOL,
    fmt: Format = OutputFormat.csv,
    threads: Threads = 1,
    out: Out = None,
):
    """Finite-N kernels w1, w2, w3 and K_N at index N + shift, or the limits s1, s2, s3,
    evaluated on each argument pair."""
    run = resolve(
        "kernel",
        v_coeffs,
        n,
        seed,
        tol,
        fmt,
        threads,
        out,
        kind=kind.value,
        args=args,
        shift=shift,
        christoffel_darboux=christoffel_darboux,
    )
    pairs = argument_pairs(args)
    spec = KernelKind(FAMILIES[kind], shift)
    rows = []
    if kind in LIMITS:
        for a, b in pairs:
            value = ScaledComplex.from_complex(limit_kernel(spec, a, b))
            rows.append([kind.value, None, a.real, a.imag, b.real, b.imag, *scaled_columns(value)])
    else:
        if kind == KernelChoice.kn and any(a.imag or b.imag for a, b in pairs):
            raise typer.BadParameter("kn takes real arguments only")
        index = spec.index(n)
        if index < 1:
            raise typer.BadParameter(f"Kernel index N + shift must be at least 1, got {index}")
        q = quadrature(run)
        table = build_recurrence(ensemble(run), index + 1, q)
        for a, b in pairs:
            if kind == KernelChoice.kn:
                value = ScaledComplex.from_complex(kernel_kn(table, index, a.real, b.real))
            elif kind == KernelChoice.w1 and christoffel_darboux:
                value = kernel_w1_cd(table, index, a, b)
            else:
                value = kernel_value(spec, table, n, a, b, q)
            rows.append([kind.value, index, a.real, a.imag, b.real, b.imag, *scaled_columns(value)])
    finish(run, ["kind", "index", "a_re", "a_im", "b_re", "b_im", *SCALED_HEADER], rows)
