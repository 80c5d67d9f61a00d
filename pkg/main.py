import logging
from typing import Optional, Tuple

import click

from commands import boundary, figures, price, schema, verify
from commands.common import ConfigSource
from config import get_settings

LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(level: str) -> None:
    """Configure the root logger; a no-op when handlers are already installed."""
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, datefmt=LOG_DATE_FORMAT)


@click.group()
@click.option(
    "--config", "config_path", type=click.Path(dir_okay=False), default=None,
    help="Run configuration (JSON). Defaults to $DRAWDOWN_CDS_CONFIG.",
)
@click.option(
    "--set", "overrides", multiple=True, metavar="KEY=VALUE",
    help="Override a config value, e.g. --set model.sigma=0.2. Repeatable.",
)
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging.")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], overrides: Tuple[str, ...], verbose: bool):
    """
    Price perpetual drawdown CDS contracts and their contract-switch option under an
    exponential-jump spectrally negative jump-diffusion.
    """
    settings = get_settings()
    configure_logging("DEBUG" if verbose else settings.LOG_LEVEL)
    ctx.obj = ConfigSource(path=config_path, overrides=tuple(overrides), settings=settings)


# Register the subcommands
cli.add_command(price.price)
cli.add_command(boundary.boundary)
cli.add_command(verify.verify)
cli.add_command(figures.figures)
cli.add_command(schema.schema)


if __name__ == "__main__":
    cli()
