import click

from slotlime.cli.common import common_options, report_errors
from slotlime.tools.click import ClickTools


@click.command("analyze", help="Exact metrics of one cluster and buffer allocation")
@click.option("--lambda", "lam", required=True, type=float, help="Arrival rate")
@click.option(
    "--mu", required=True, callback=ClickTools.parse_float_list, help="Service rates, e.g. 0.6,0.4"
)
@click.option(
    "--ell", required=True, callback=ClickTools.parse_int_list, help="Buffer lengths, e.g. 1,1"
)
@common_options()
@click.pass_context
@report_errors
def analyze(ctx: click.Context, lam, mu, ell, **_):
    """CSV columns: lambda, loss, rho1..rhoN, alpha1..alphaN, mean_response_time,
    throughput, log_norm_const (servers in the given order)."""
    from slotlime.cli.common import CommandOutput, RunSpec, emit, server_labels
    from slotlime.model.cluster import ClusterParams, validate
    from slotlime.productform.metrics import analyze as analyze_instance

    spec = RunSpec.from_params("analyze", ctx.params)
    params = ClusterParams(lam=lam, mu=tuple(mu))
    alloc = params.allocation(ell)
    validate(params, alloc)
    report = analyze_instance(params, alloc).in_user_order(params)

    n = params.n_servers
    header = [
        "lambda",
        "loss",
        *server_labels("rho", n),
        *server_labels("alpha", n),
        "mean_response_time",
        "throughput",
        "log_norm_const",
    ]
    row = [
        lam,
        report.loss,
        *report.occupation,
        *report.mean_jobs,
        report.mean_response_time,
        report.throughput,
        report.norm_const_log,
    ]
    payload = {"params": params.to_dict(), "ell": list(ell), "metrics": report.to_dict()}
    emit(spec, CommandOutput(header, [row], payload, title="metrics"))
