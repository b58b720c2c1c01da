from pathlib import Path

import click

from ..grid_geometry import GridSpec, distance_field, probe_level_set, rasterize_polygons
from ..ifs_core import prefractal_pieces
from ..model_io import resolve_model
from ..montecarlo import realization
from ..output import fmt, write_field_csv, write_pbm
from .common import build_run_config, emit_csv, handle_errors, model_source, run_options, summary_console

FIELDS = ["x", "y", "J_estimate"]


@click.command()
@model_source
@click.option("--r", "r", type=float, required=True, help="Radius of the level set {d = r}.")
@click.option("--points", type=click.IntRange(min=1), default=64, show_default=True, help="Probe points on the level set.")
@click.option("--tol", type=float, default=None, help="Near-minimizer slack (defaults to one cell).")
@click.option("--replica", type=int, default=0, show_default=True)
@run_options
@click.option("--dump", type=click.Path(file_okay=False), default=None, help="Write seeds.pbm and field.csv here.")
@click.option("--output", type=click.Path(dir_okay=False, writable=True), default=None)
@handle_errors
def probe(model_path, gasket, r, points, tol, replica, samples, seed, mode, cells_per_eps, threads, max_depth, dump, output):
    """Regularity probe along the level set of one realization's distance function."""
    model = resolve_model(model_path, gasket)
    config = build_run_config(model, samples, seed, mode, cells_per_eps, threads, max_depth)
    config.check_radius(r)
    h = r / config.cells_per_eps
    real = realization(config, replica)
    polys = prefractal_pieces(real, h, config.max_depth).apply(model.vertices)
    grid = GridSpec.covering(model.vertices, r, h)
    mask = rasterize_polygons(polys, grid, mark_centroids=True)
    field = distance_field(mask, grid)
    table = probe_level_set(field, grid, r, grid.centers(mask), h if tol is None else tol, samples=points)
    if dump:
        dump_dir = Path(dump)
        write_pbm(dump_dir / "seeds.pbm", mask)
        write_field_csv(dump_dir / "field.csv", field.values, grid.origin, h)
    emit_csv(output, FIELDS, ({"x": fmt(x), "y": fmt(y), "J_estimate": fmt(j)} for x, y, j in table))

    out = summary_console(output)
    if not len(table):
        out.print("[warning]level set is empty on this grid[/warning]")
        return
    smallest = float(table[:, 2].min())
    if smallest <= 2 * h:
        out.print(f"[warning]min J = {smallest:.6g}: r = {r:g} is near-critical[/warning]")
    else:
        out.print(f"[success]min J = {smallest:.6g}: r = {r:g} looks regular[/success]")
