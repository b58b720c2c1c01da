import click

from ..model_io import resolve_model
from ..montecarlo import gamma_audit
from ..output import fmt
from .common import SCHEDULE, build_run_config, emit_csv, handle_errors, model_source, replica_progress, run_options, summary_console

FIELDS = ["r", "observed_max", "gamma_bound"]


@click.command()
@model_source
@click.option("--schedule", type=SCHEDULE, required=True, help="Radii START*RATIO^m for m < COUNT.")
@run_options
@click.option("--output", type=click.Path(dir_okay=False, writable=True), default=None)
@handle_errors
def audit(model_path, gasket, schedule, samples, seed, mode, cells_per_eps, threads, max_depth, output):
    """Largest neighbor count over replicas per radius, against the Gamma bound."""
    model = resolve_model(model_path, gasket)
    config = build_run_config(model, samples, seed, mode, cells_per_eps, threads, max_depth)
    with replica_progress("audit", config.samples) as progress:
        report = gamma_audit(config, schedule, progress)
    emit_csv(output, FIELDS, (
        {"r": fmt(r), "observed_max": n, "gamma_bound": fmt(report.bound)}
        for r, n in zip(report.radii, report.observed)
    ))
    out = summary_console(output)
    style = "success" if report.within_bound else "error"
    out.print(f"[{style}]observed max {report.observed_max} vs bound {report.bound:.6g}[/{style}]")
