import click

from slotlime.cli.common import common_options, report_errors


@click.command("figures", help="Data table behind one of the figures 3 to 8")
@click.argument("figure_id", type=click.Choice(["3", "4", "5", "6", "7", "8"]))
@click.option("--total-slots", type=int, default=None, help="Override L (20, or 40 for 7 and 8)")
@click.option("--lambda-max", type=float, default=None, help="Override the largest arrival rate")
@click.option("--points", type=int, default=None, help="Override the number of grid points")
@common_options()
@click.pass_context
@report_errors
def figures(ctx: click.Context, figure_id, total_slots, lambda_max, points, **_):
    """Columns:

    \b
    3: l1, lambda=0.25 ... lambda=2 (loss probability, mu = 0.9,0.1)
    4: lambda, mu1=0.5 ... mu1=0.95 (loss-optimal l1)
    5: lambda, l1=0 ... l1=20 (mean response time, mu = 0.75,0.25)
    6: lambda, mu1=0.5 ... mu1=0.95 (response-time-optimal l1)
    7, 8: lambda, l1, l2, l3, l4 (loss and response time optima, mu = 0.45,0.3,0.2,0.05)
    """
    from slotlime.cli.common import CommandOutput, RunSpec, emit
    from slotlime.model.errors import InvalidGridError
    from slotlime.figures.tables import build_figure

    spec = RunSpec.from_params("figures", ctx.params)
    if (points is not None and points < 1) or (lambda_max is not None and lambda_max <= 0):
        raise InvalidGridError("the arrival rate grid is empty")
    table = build_figure(
        int(figure_id),
        total_slots=total_slots,
        lambda_max=lambda_max,
        points=points,
        workers=spec.threads,
        progress=ctx.params["progress"],
    )
    payload = {"figure": table.name, "header": list(table.header), "rows": table.rows}
    emit(spec, CommandOutput(table.header, table.rows, payload, title=table.name))
