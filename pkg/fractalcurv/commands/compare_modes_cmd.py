import click

from ..model_io import resolve_model
from ..montecarlo import mode_comparison
from ..output import fmt
from .common import build_run_config, emit_csv, handle_errors, model_source, replica_progress, summary_console
from .r_curve_cmd import interior_radii, resolve_cutoff

FIELDS = ["r", "k", "homogeneous_mean", "homogeneous_stderr", "recursive_mean", "recursive_stderr", "combined_stderr"]


@click.command("compare-modes")
@model_source
@click.option("--k", "k", type=click.IntRange(0, 2), required=True, help="Curvature order.")
@click.option("--L", "L", type=float, default=None, help="Cutoff L (defaults to sqrt(3)/6 for the gasket family).")
@click.option("--points", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--samples", type=int, default=None, help="Replicas per mode and radius.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cells-per-eps", type=int, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--max-depth", type=int, default=None)
@click.option("--output", type=click.Path(dir_okay=False, writable=True), default=None)
@handle_errors
def compare_modes(model_path, gasket, k, L, points, samples, seed, cells_per_eps, threads, max_depth, output):
    """Empirical R of the homogeneous and the recursive construction side by side."""
    model = resolve_model(model_path, gasket)
    L = resolve_cutoff(model, L)
    homogeneous = build_run_config(model, samples, seed, "homogeneous", cells_per_eps, threads, max_depth, (k,))
    recursive = build_run_config(model, samples, seed, "recursive", cells_per_eps, threads, max_depth, (k,))
    radii = interior_radii(L, points)
    for r in radii:
        homogeneous.check_radius(float(r))
    with replica_progress("compare-modes", 2 * homogeneous.samples * len(radii)) as progress:
        table = mode_comparison(homogeneous, recursive, k, L, radii, progress)
    emit_csv(output, FIELDS, (
        {
            "r": fmt(row.r), "k": k,
            "homogeneous_mean": fmt(row.homogeneous.mean), "homogeneous_stderr": fmt(row.homogeneous.stderr),
            "recursive_mean": fmt(row.recursive.mean), "recursive_stderr": fmt(row.recursive.stderr),
            "combined_stderr": fmt(row.combined_stderr),
        }
        for row in table
    ))
    out = summary_console(output)
    outside = [row.r for row in table if row.combined_stderr and abs(row.difference) > 3 * row.combined_stderr]
    if outside:
        out.print(f"[warning]{len(outside)} radii differ by more than 3 combined stderr[/warning]")
    else:
        out.print("[success]Modes agree within 3 combined stderr at every radius[/success]")
