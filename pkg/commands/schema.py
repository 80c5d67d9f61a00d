import json

import click

from schemas.report import BoundaryReport, PriceReport, VerifyReport

REPORTS = {
    "price": PriceReport,
    "boundary": BoundaryReport,
    "verify": VerifyReport,
}


@click.command("schema")
@click.argument("report", type=click.Choice(sorted(REPORTS)), required=False)
def schema(report):
    """Print the JSON schema of the --json reports (all of them when REPORT is omitted)."""
    if report is not None:
        document = REPORTS[report].model_json_schema()
    else:
        document = {name: model.model_json_schema() for name, model in REPORTS.items()}
    click.echo(json.dumps(document, indent=2, sort_keys=True))
