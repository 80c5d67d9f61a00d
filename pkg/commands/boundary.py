import click

from commands.common import PricingContext, emit, pricing_command
from pricing.cds import payoff_G
from schemas.report import BoundaryReport


def _lines(report: BoundaryReport) -> list:
    sol = report.solution
    lower, upper = sol.gamma_window
    return [
        f"gamma_window     ({lower:.10g}, {upper:.10g})",
        f"f(0)             {sol.f_at_0:.10g}",
        f"f(b)             {sol.f_at_b:.10g}",
        f"h_star           {sol.h_star:.10g}",
        f"f(h_star)        {sol.f_at_h_star:.3e}",
        f"G_b(h_star)      {report.payoff_at_h_star:.10g}",
        f"continuous_gap   {sol.continuous_gap:.3e}",
        f"pasting_gap      {sol.pasting_gap:.3e}",
        f"iterations       {sol.iterations}",
    ]


@click.command("boundary")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
@pricing_command
def boundary(pricing: PricingContext, as_json: bool):
    """
    Solve the optimal switch boundary h* and print its diagnostics.

    Args:
        pricing (PricingContext): Validated configuration with evaluator and boundary.
        as_json (bool): Emit JSON instead of text.
    """
    sol = pricing.solution
    report = BoundaryReport(
        solution=sol,
        payoff_at_h_star=payoff_G(pricing.evaluator, pricing.switch, sol.b, sol.h_star),
    )
    emit(report, as_json, _lines)
