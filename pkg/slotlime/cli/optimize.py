import click

from slotlime.cli.common import common_options, report_errors
from slotlime.tools.click import ClickTools

_METRICS = ["loss", "response_time"]


@click.command("optimize", help="Exhaustive search of the best split of L slots")
@click.option("--lambda", "lam", required=True, type=float, help="Arrival rate")
@click.option("--mu", required=True, callback=ClickTools.parse_float_list, help="Service rates")
@click.option("--total-slots", "-L", required=True, type=int, help="Slots to allocate")
@click.option("--metric", type=click.Choice(_METRICS), default="loss", show_default=True)
@click.option("--tie-tolerance", type=float, default=1e-12, show_default=True)
@common_options()
@click.pass_context
@report_errors
def optimize(ctx: click.Context, lam, mu, total_slots, metric, tie_tolerance, **_):
    """CSV columns: lambda, l1..lN (canonical minimizer), best_value, ties."""
    from slotlime.cli.common import CommandOutput, RunSpec, emit, server_labels
    from slotlime.optimizer.models import Metric, OptimizationQuery
    from slotlime.optimizer.search import optimal_allocation

    spec = RunSpec.from_params("optimize", ctx.params)
    query = OptimizationQuery(
        lam=lam,
        mu=tuple(mu),
        total_slots=total_slots,
        metric=Metric(metric),
        tie_tolerance=tie_tolerance,
    )
    result = optimal_allocation(query)
    header = ["lambda", *server_labels("l", len(mu)), "best_value", "ties"]
    row = [lam, *result.user_canonical(), result.best_value, result.ties]
    emit(spec, CommandOutput(header, [row], {"result": result.to_dict()}, title="optimum"))


@click.command("sweep", help="Optimal allocation along an increasing arrival rate grid")
@click.option(
    "--mu",
    "mu_list",
    required=True,
    multiple=True,
    callback=lambda ctx, param, value: [
        ClickTools.parse_float_list(ctx, param, v) for v in value
    ],
    help="Service rates, repeat the option to sweep several clusters",
)
@click.option("--total-slots", "-L", required=True, type=int, help="Slots to allocate")
@click.option("--metric", type=click.Choice(_METRICS), default="loss", show_default=True)
@click.option(
    "--lambda-grid",
    callback=ClickTools.parse_float_list,
    default=None,
    help="Explicit arrival rates, e.g. 0.1,0.5,1",
)
@click.option("--lambda-max", type=float, default=5.0, show_default=True)
@click.option(
    "--points",
    type=int,
    default=100,
    show_default=True,
    help="Grid lambda_max * k / points for k = 1..points, unless --lambda-grid is given",
)
@common_options()
@click.pass_context
@report_errors
def sweep(ctx: click.Context, mu_list, total_slots, metric, lambda_grid, lambda_max, points, **_):
    """CSV columns: mu1..muN, lambda, l1..lN, best_value, ties; one row per cluster
    and arrival rate. Monotonicity violations of the fastest (and, with more than two
    servers, slowest) buffer are logged and listed in the JSON output."""
    from slotlime.cli.common import CommandOutput, RunSpec, emit, server_labels
    from slotlime.figures.tables import uniform_grid
    from slotlime.model.errors import DimensionMismatchError, InvalidGridError
    from slotlime.optimizer.models import Metric
    from slotlime.optimizer.scans import monotonicity_scan

    spec = RunSpec.from_params("sweep", ctx.params)
    if lambda_grid is None:
        if points < 1 or lambda_max <= 0:
            raise InvalidGridError("the arrival rate grid is empty")
        lambda_grid = uniform_grid(lambda_max, points)
    n = len(mu_list[0])
    if any(len(mu) != n for mu in mu_list):
        raise DimensionMismatchError("every --mu needs the same number of servers")

    rows, scans = [], []
    for mu in mu_list:
        report = monotonicity_scan(
            mu,
            total_slots,
            lambda_grid,
            Metric(metric),
            workers=spec.threads,
            progress=ctx.params["progress"],
        )
        rows += [[*mu, lam, *ell, best, ties] for lam, ell, best, ties in report.user_rows()]
        scans.append(
            {
                "mu": list(mu),
                "asserted": report.asserted,
                "passed": report.passed,
                "violations": [
                    {
                        "server": report.params.order[v.server] + 1,
                        "expected": v.expected,
                        "lambda_prev": v.lam_prev,
                        "lambda_next": v.lam_next,
                        "length_prev": v.length_prev,
                        "length_next": v.length_next,
                    }
                    for v in report.violations
                ],
            }
        )
    header = [*server_labels("mu", n), "lambda", *server_labels("l", n), "best_value", "ties"]
    payload = {"header": header, "rows": rows, "scans": scans}
    emit(spec, CommandOutput(header, rows, payload, title="sweep"))
