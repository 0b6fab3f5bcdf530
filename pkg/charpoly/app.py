import logging
import sys
from typing import Annotated

import click
import typer

import charpoly
from charpoly.commands import (
    cauchy,
    corr,
    equilibrium,
    identities,
    kernel,
    mc,
    moments,
    ortho,
    scaling,
)
from charpoly.utils.errors import CharpolyError, ToleranceBreached

log = logging.getLogger(__name__)

EXIT_DOMAIN_ERROR = 1
EXIT_TOLERANCE = 2
EXIT_USAGE = 64

app = typer.Typer(
    name="charpoly",
    help="Correlation functions of characteristic polynomials of Hermitian random matrices.",
    add_completion=False,
    no_args_is_help=True,
)


def _version(value: bool) -> None:
    if value:
        typer.echo(charpoly.__version__)
        raise typer.Exit()


@app.callback()
def root(
    verbose: Annotated[bool, typer.Option("--verbose", help="Debug logging")] = False,
    version: Annotated[
        bool, typer.Option("--version", callback=_version, is_eager=True)
    ] = False,
):
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


app.command("ortho")(ortho.ortho)
app.command("cauchy")(cauchy.cauchy)
app.command("kernel")(kernel.kernel)
app.command("corr")(corr.corr)
app.command("mc")(mc.mc)
app.command("equilibrium")(equilibrium.equilibrium)
app.command("scaling")(scaling.scaling)
app.command("moments")(moments.moments)
app.command("identities")(identities.identities)


def run(args: list[str] | None = None) -> int:
    """Runs one invocation and maps failures to exit codes."""
    command = typer.main.get_command(app)
    try:
        command.main(args=args, prog_name="charpoly", standalone_mode=False)
    except click.UsageError as ex:
        ex.show()
        return EXIT_USAGE
    except click.ClickException as ex:
        ex.show()
        return ex.exit_code
    except click.exceptions.Abort:
        log.error("Aborted")
        return EXIT_DOMAIN_ERROR
    except ToleranceBreached as ex:
        log.error("Tolerance breached: %s", ex)
        return EXIT_TOLERANCE
    except CharpolyError as ex:
        log.error("%s: %s", type(ex).__name__, ex)
        return EXIT_DOMAIN_ERROR
    return 0


def main() -> None:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr)
    sys.exit(run())
