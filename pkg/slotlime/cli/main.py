import click
from loguru import logger

from slotlime import __version__
from slotlime.cli.analyze import analyze
from slotlime.cli.figures import figures
from slotlime.cli.optimize import optimize, sweep
from slotlime.cli.simulate import simulate
from slotlime.cli.verify import verify

LOG_LEVELS = ("WARNING", "INFO", "DEBUG")


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug messages")
@click.version_option(__version__)
def slotlime(verbose: int):
    logger.remove()
    # resolved at write time, stderr may be swapped while the group runs
    logger.add(
        lambda message: click.echo(message, err=True, nl=False),
        level=LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)],
    )


slotlime.add_command(analyze)
slotlime.add_command(optimize)
slotlime.add_command(sweep)
slotlime.add_command(simulate)
slotlime.add_command(verify)
slotlime.add_command(figures)
