import click

from slotlime.cli.common import OutputFormat, common_options, report_errors
from slotlime.tools.click import ClickTools

SUITE_NAMES = ["productform", "propositions", "conjecture", "insensitivity"]


def _suite_kwargs(suite: str, options: dict) -> dict:
    """Keyword arguments of one suite from the command options that were set."""
    common = {"workers": options["threads"], "progress": options["progress"]}
    if suite == "productform":
        return {
            **common,
            "max_states": options["max_states"],
            "instances": options["instances"],
            "seed": options["seed"],
        }
    if suite == "propositions":
        kwargs = {"max_total": options["max_total"], "points": options["points"]}
        if options["mu1_grid"] is not None:
            kwargs["mu1_grid"] = tuple(options["mu1_grid"])
        return {"progress": options["progress"], **kwargs}
    if suite == "conjecture":
        kwargs = dict(common)
        if options["mu"] is not None:
            kwargs["mu"] = tuple(options["mu"])
        if options["total_slots"] is not None:
            kwargs["total_slots"] = options["total_slots"]
        if options["lambda_grid"] is not None:
            kwargs["lambda_grid"] = options["lambda_grid"]
        return kwargs
    return {
        **common,
        "arrivals": options["arrivals"],
        "replications": options["replications"],
        "seed": options["seed"],
    }


@click.command("verify", help="Runs a verification suite, exit code 1 when a check fails")
@click.argument("suite", type=click.Choice(SUITE_NAMES))
@click.option("--max-states", type=int, default=5000, show_default=True, help="[productform]")
@click.option("--instances", type=int, default=200, show_default=True, help="[productform]")
@click.option(
    "--L", "--max-total", "max_total", type=int, default=12, show_default=True,
    help="[propositions] largest total number of slots",
)
@click.option(
    "--mu1-grid", callback=ClickTools.parse_float_list, default=None,
    help="[propositions] fast server shares, default 0.55,0.6,...,0.95",
)
@click.option("--points", type=int, default=50, show_default=True, help="[propositions]")
@click.option(
    "--mu", callback=ClickTools.parse_float_list, default=None,
    help="[conjecture] service rates, default 0.45,0.3,0.2,0.05",
)
@click.option("--total-slots", type=int, default=None, help="[conjecture] default 40")
@click.option(
    "--lambda-grid", callback=ClickTools.parse_float_list, default=None,
    help="[conjecture] arrival rates, default 50 points from 0.1 to 7",
)
@click.option("--arrivals", type=int, default=125_000, show_default=True, help="[insensitivity]")
@click.option("--replications", type=int, default=20, show_default=True, help="[insensitivity]")
@common_options(default_format=OutputFormat.JSON)
@click.pass_context
@report_errors
def verify(ctx: click.Context, suite: str, **_):
    """CSV columns: suite, passed, checks, failures, max_error."""
    from slotlime.cli.common import CommandOutput, RunSpec, emit
    from slotlime.verification.suites import run_suite

    spec = RunSpec.from_params("verify", ctx.params)
    report = run_suite(suite, **_suite_kwargs(suite, ctx.params))
    row = [suite, report.passed, report.checks, len(report.failures), report.max_error]
    emit(
        spec,
        CommandOutput(
            ["suite", "passed", "checks", "failures", "max_error"],
            [row],
            {"report": report.to_dict()},
            title=suite,
        ),
    )
    if not report.passed:
        ctx.exit(1)
