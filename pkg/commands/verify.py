import logging

import click

from commands.common import CommandError, PricingContext, emit, pricing_command
from schemas.report import VerifyReport
from verification.suite import analytic_checks, monte_carlo_checks

logger = logging.getLogger(__name__)


def _lines(report: VerifyReport) -> list:
    lines = [
        f"{'PASS' if check.passed else 'FAIL'}  {check.name:<34} {check.value:.3e}  (tol {check.tolerance:.1e})"
        for check in report.checks
    ]
    if report.generator_values:
        stats = report.generator_values
        lines.append(
            f"(L_Y - r) G_b: min {stats['min']:.8g}, max {stats['max']:.8g}, target {stats['target']:.8g}"
        )
    lines.append("all checks passed" if report.passed else "some checks failed")
    return lines


@click.command("verify")
@click.option("--analytic", "mode", flag_value="analytic", default=True, help="Deterministic checks only (default).")
@click.option("--mc", "mode", flag_value="mc", help="Monte Carlo checks only.")
@click.option("--all", "mode", flag_value="all", help="Both suites.")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
@pricing_command
def verify(pricing: PricingContext, mode: str, as_json: bool):
    """
    Run the verification suites; exits 1 when any check fails.

    Args:
        pricing (PricingContext): Validated configuration with evaluator and boundary.
        mode (str): "analytic", "mc" or "all".
        as_json (bool): Emit JSON instead of text.

    Raises:
        CommandError: If any check fails.
    """
    checks, generator_values = [], {}
    if mode in ("analytic", "all"):
        analytic, generator_values = analytic_checks(
            pricing.config, pricing.evaluator, pricing.switch, pricing.solution
        )
        checks.extend(analytic)
    if mode in ("mc", "all"):
        simulated, _ = monte_carlo_checks(
            pricing.config, pricing.evaluator, pricing.switch, pricing.solution, pricing.path_config
        )
        checks.extend(simulated)

    report = VerifyReport(
        passed=all(check.passed for check in checks),
        checks=checks,
        generator_values=generator_values,
    )
    emit(report, as_json, _lines)
    if not report.passed:
        failed = ", ".join(check.name for check in checks if not check.passed)
        raise CommandError(f"failed checks: {failed}", 1)
