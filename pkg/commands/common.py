import functools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Tuple

import click
from pydantic import BaseModel, ValidationError

from config import Settings, load_run_config
from errors import PricingError
from models.scale import ScaleEvaluator
from pricing.stopping import solve_h_star
from schemas.config import RunConfig
from schemas.contract import SwitchTerms
from schemas.numerics import PathConfig
from schemas.report import BoundarySolution

logger = logging.getLogger(__name__)


class CommandError(click.ClickException):
    """
    Error reported by a subcommand with a specific process exit code.

    Attributes:
        exit_code (int): 1 for failed checks and numerical failures, 2 for usage errors.
    """

    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


@dataclass(frozen=True)
class ConfigSource:
    """Where the group options say the run configuration comes from."""
    path: Optional[str]
    overrides: Tuple[str, ...]
    settings: Settings


class PricingContext:
    """
    Validated run configuration with lazily built evaluator and boundary.

    Attributes:
        config (RunConfig): The validated configuration.
        settings (Settings): Runtime settings.
    """

    def __init__(self, config: RunConfig, settings: Settings):
        self.config = config
        self.settings = settings

    @cached_property
    def evaluator(self) -> ScaleEvaluator:
        return ScaleEvaluator(self.config.model, self.config.contract.r, root_tol=self.config.numerics.root_tol)

    @cached_property
    def switch(self) -> SwitchTerms:
        return self.config.switch_terms()

    @cached_property
    def solution(self) -> BoundarySolution:
        return solve_h_star(
            self.evaluator, self.switch, self.config.contract.b, tol=self.config.numerics.boundary_tol
        )

    @property
    def path_config(self) -> PathConfig:
        cfg = self.config.numerics.mc
        if self.settings.MC_WORKERS > 1:
            cfg = cfg.model_copy(update={"workers": self.settings.MC_WORKERS})
        return cfg


def pricing_command(func: Callable) -> Callable:
    """
    Pass a PricingContext built from the group options as the first argument and turn
    library errors into CommandError with the matching exit code.
    """

    @functools.wraps(func)
    def wrapper(source: ConfigSource, *args, **kwargs):
        try:
            pricing = PricingContext(load_run_config(source.path, source.overrides), source.settings)
            return func(pricing, *args, **kwargs)
        except PricingError as exc:
            logger.debug("%s raised %s", func.__name__, type(exc).__name__)
            raise CommandError(f"{type(exc).__name__}: {exc.detail}", exc.exit_code) from exc
        except ValidationError as exc:
            raise CommandError(str(exc), 2) from exc

    return click.pass_obj(wrapper)


def emit(report: BaseModel, as_json: bool, lines: Callable[[BaseModel], list]) -> None:
    """Print the report as indented JSON or as the human readable lines."""
    if as_json:
        click.echo(report.model_dump_json(indent=2))
        return
    for line in lines(report):
        click.echo(line)
