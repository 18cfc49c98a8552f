import click

from slotlime.cli.common import common_options, report_errors
from slotlime.tools.click import ClickTools


def _service(kind: str, scv: float):
    from slotlime.simulator.config import ServiceDistribution

    if kind == "deterministic":
        return ServiceDistribution.deterministic()
    if kind == "hyperexponential":
        return ServiceDistribution.hyperexponential_scv(scv)
    return ServiceDistribution.exponential()


@click.command("simulate", help="Replicated event simulation against the exact metrics")
@click.option("--lambda", "lam", required=True, type=float, help="Arrival rate")
@click.option("--mu", required=True, callback=ClickTools.parse_float_list, help="Service rates")
@click.option("--ell", required=True, callback=ClickTools.parse_int_list, help="Buffer lengths")
@click.option("--scheduler", type=click.Choice(["ps", "fcfs"]), default="ps", show_default=True)
@click.option(
    "--service",
    type=click.Choice(["exponential", "deterministic", "hyperexponential"]),
    default="exponential",
    show_default=True,
    help="Unit-mean job size distribution",
)
@click.option(
    "--scv",
    type=click.FloatRange(min=1.0, min_open=True),
    default=4.0,
    show_default=True,
    help="Squared coefficient of variation of the hyperexponential sizes",
)
@click.option("--arrivals", type=int, default=1_000_000, show_default=True)
@click.option("--max-time", type=float, default=None, help="Cap on simulated time")
@click.option("--warmup-fraction", type=float, default=0.2, show_default=True)
@click.option("--replications", type=int, default=20, show_default=True)
@click.option("--confidence", type=float, default=0.95, show_default=True)
@click.option(
    "--insensitivity",
    is_flag=True,
    help="Compare exponential, deterministic and hyperexponential sizes, exit 1 on failure",
)
@common_options()
@click.pass_context
@report_errors
def simulate(
    ctx: click.Context,
    lam,
    mu,
    ell,
    scheduler,
    service,
    scv,
    arrivals,
    max_time,
    warmup_fraction,
    replications,
    confidence,
    insensitivity,
    **_,
):
    """CSV columns: metric, mean, half_width, analytic; with --insensitivity:
    metric, distribution, mean, half_width, analytic, covered."""
    from slotlime.cli.common import CommandOutput, RunSpec, emit
    from slotlime.model.cluster import validate
    from slotlime.productform.metrics import analyze
    from slotlime.simulator.config import Scheduler, SimConfig
    from slotlime.simulator.estimates import estimate_metrics, insensitivity_test

    spec = RunSpec.from_params("simulate", ctx.params)
    cfg = SimConfig(
        lam=lam,
        mu=tuple(mu),
        ell=tuple(ell),
        scheduler=Scheduler(scheduler),
        service=_service(service, scv),
        arrivals=arrivals,
        max_time=max_time,
        warmup_fraction=warmup_fraction,
        replications=replications,
        seed=spec.seed,
        confidence=confidence,
    )
    params = cfg.params
    validate(params, cfg.allocation)
    progress = ctx.params["progress"]

    if insensitivity:
        report = insensitivity_test(cfg, workers=spec.threads, progress=progress)
        rows = [
            [c.metric, label, m, h, c.analytic, c.covered[label]]
            for c in report.checks
            for label, (m, h) in c.estimates.items()
        ]
        header = ["metric", "distribution", "mean", "half_width", "analytic", "covered"]
        payload = {"passed": report.passed, "checks": [c.to_dict() for c in report.checks]}
        emit(spec, CommandOutput(header, rows, payload, title="insensitivity"))
        if not report.passed:
            ctx.exit(1)
        return

    exact = analyze(params, cfg.allocation).in_user_order(params)
    estimate = estimate_metrics(cfg, workers=spec.threads, progress=progress).in_user_order(
        params
    )
    rows = [
        ["loss", *estimate.loss, exact.loss],
        ["mean_response_time", *estimate.mean_response_time, exact.mean_response_time],
        ["throughput", *estimate.throughput, exact.throughput],
    ]
    rows += [[f"rho{i + 1}", *iv, exact.occupation[i]] for i, iv in enumerate(estimate.occupation)]
    rows += [[f"alpha{i + 1}", *iv, exact.mean_jobs[i]] for i, iv in enumerate(estimate.mean_jobs)]
    payload = {
        "params": params.to_dict(),
        "ell": list(ell),
        "service": {"kind": cfg.service.kind.value, "scv": cfg.service.scv},
        "estimate": estimate.to_dict(),
        "analytic": exact.to_dict(),
    }
    emit(spec, CommandOutput(["metric", "mean", "half_width", "analytic"], rows, payload))
