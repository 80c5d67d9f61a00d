import logging

import click

from commands.common import PricingContext, emit, pricing_command
from errors import DomainError
from pricing.cds import cds_value, par_spread_perpetual
from pricing.drawdown import check_interval
from pricing.stopping import value_function
from schemas.report import PriceReport

logger = logging.getLogger(__name__)


def _lines(report: PriceReport) -> list:
    spread = "undefined" if report.par_spread is None else f"{report.par_spread:.10g}"
    return [
        f"y             {report.y:.10g}",
        f"cds_value     {report.cds_value:.10g}",
        f"option_value  {report.option_value:.10g}",
        f"total_value   {report.total_value:.10g}",
        f"h_star        {report.h_star:.10g}",
        f"par_spread    {spread}",
    ]


@click.command("price")
@click.option("--y", "y", type=float, required=True, help="Initial drawdown, 0 <= y <= b.")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
@pricing_command
def price(pricing: PricingContext, y: float, as_json: bool):
    """
    Price the perpetual CDS and its switch option at drawdown y.

    Args:
        pricing (PricingContext): Validated configuration with evaluator and boundary.
        y (float): Initial drawdown.
        as_json (bool): Emit JSON instead of text.
    """
    terms = pricing.config.contract
    y = check_interval("y", y, 0.0, terms.b)
    ev, sol = pricing.evaluator, pricing.solution

    cds = cds_value(ev, terms, y)
    option = value_function(sol, ev, pricing.switch, terms.b, y)
    try:
        spread = par_spread_perpetual(ev, terms.alpha, terms.b, y)
    except DomainError:
        spread = None

    report = PriceReport(
        y=y,
        cds_value=cds,
        option_value=option,
        total_value=cds + option,
        h_star=sol.h_star,
        par_spread=spread,
    )
    logger.info("priced y = %.6g: total value %.8g", y, report.total_value)
    emit(report, as_json, _lines)
