import click

from ..errors import InsufficientDataError, NotGasketFamilyError
from ..exact_gasket import closed_form_frac, match_gasket
from ..model_io import resolve_model
from ..montecarlo import Schedule, cesaro_average, expectation_bound_constant, rescaled_table
from ..output import fmt
from ..renewal import scaling_data
from .common import (
    K_SET, SCHEDULE, build_run_config, emit_csv, handle_errors, model_source, replica_progress,
    run_options, summary_console,
)

FIELDS = ["eps", "k", "raw_mean", "raw_stderr", "rescaled_mean", "rescaled_stderr", "kind"]
DEFAULT_SCHEDULE = "0.0673:2^-0.25:16"


def table_rows(rows, cesaro):
    for row in rows:
        for k in sorted(row.raw):
            raw, rescaled = row.raw[k], row.rescaled[k]
            yield {
                "eps": fmt(row.eps), "k": k,
                "raw_mean": fmt(raw.mean), "raw_stderr": fmt(raw.stderr),
                "rescaled_mean": fmt(rescaled.mean), "rescaled_stderr": fmt(rescaled.stderr),
                "kind": "row",
            }
    for k in sorted(cesaro):
        yield {
            "eps": "", "k": k, "raw_mean": "", "raw_stderr": "",
            "rescaled_mean": fmt(cesaro[k]), "rescaled_stderr": "", "kind": "cesaro",
        }


@click.command()
@model_source
@click.option("--schedule", type=SCHEDULE, default=DEFAULT_SCHEDULE, show_default=True,
              help="Radii START*RATIO^m for m < COUNT.")
@click.option("--k-set", "k_set", type=K_SET, default="0,1,2", show_default=True)
@click.option("--cesaro-skip", type=click.IntRange(min=0), default=0, show_default=True,
              help="Largest radii left out of the Cesaro row.")
@run_options
@click.option("--output", type=click.Path(dir_okay=False, writable=True), default=None, help="CSV file; stdout if omitted.")
@handle_errors
def simulate(model_path, gasket, schedule: Schedule, k_set, cesaro_skip, samples, seed, mode, cells_per_eps, threads, max_depth, output):
    """Rescaled mean curvatures over a radius schedule, with a trailing Cesaro row."""
    model = resolve_model(model_path, gasket)
    config = build_run_config(model, samples, seed, mode, cells_per_eps, threads, max_depth, k_set)
    schedule.check(config.min_eps)
    if schedule.count - cesaro_skip < 3:
        raise InsufficientDataError("the Cesaro row needs at least 3 radii after --cesaro-skip")
    scaling = scaling_data(model)
    with replica_progress("simulate", config.samples * schedule.count) as progress:
        rows = rescaled_table(config, schedule, scaling.D, progress)
    cesaro = cesaro_average(rows, cesaro_skip)
    emit_csv(output, FIELDS, table_rows(rows, cesaro))

    out = summary_console(output)
    bound = expectation_bound_constant(rows, scaling.D, model.big_R)
    for k in config.k_set:
        out.print(f"[highlight]k={k}[/highlight] cesaro={cesaro[k]:.6g} log-bound constant={bound.get(k, 0.0):.6g}")
    try:
        params = match_gasket(model)
    except NotGasketFamilyError:
        return
    for k in config.k_set:
        exact = closed_form_frac(k, params, scaling)
        out.print(f"[muted]k={k} closed form={exact:.6g}[/muted]")
