import math

import click
import numpy as np

from ..errors import ModelConfigError, NotGasketFamilyError
from ..exact_gasket import GASKET_L, match_gasket, r_curve
from ..model_io import resolve_model
from ..montecarlo import empirical_R
from ..output import fmt
from .common import build_run_config, emit_csv, handle_errors, model_source, replica_progress, run_options

FIELDS = ["r", "k", "emp_mean", "emp_stderr", "analytic"]


def interior_radii(L, points):
    """Midpoints of ``points`` equal slices of (0, L)."""
    return L * (np.arange(points) + 0.5) / points


def resolve_cutoff(model, L):
    """L as given, or sqrt(3)/6 for models of the gasket family."""
    if L is not None:
        return L
    try:
        match_gasket(model)
    except NotGasketFamilyError:
        raise ModelConfigError("--L is required for models outside the gasket family") from None
    return GASKET_L


def analytic_overlay(model, k, L):
    """The closed-form curve when the model is a gasket and L is the standard choice, else None."""
    if k not in (0, 1) or not math.isclose(L, GASKET_L, rel_tol=1e-12):
        return None
    try:
        return r_curve(k, match_gasket(model))
    except NotGasketFamilyError:
        return None


@click.command("r-curve")
@model_source
@click.option("--k", "k", type=click.IntRange(0, 2), required=True, help="Curvature order.")
@click.option("--L", "L", type=float, default=None, help="Cutoff L (defaults to sqrt(3)/6 for the gasket family).")
@click.option("--points", type=click.IntRange(min=1), default=8, show_default=True, help="Radii in (0, L).")
@run_options
@click.option("--output", type=click.Path(dir_okay=False, writable=True), default=None, help="CSV file; stdout if omitted.")
@handle_errors
def r_curve_cmd(model_path, gasket, k, L, points, samples, seed, mode, cells_per_eps, threads, max_depth, output):
    """Empirical R_{k,L}(r) on a radius grid, with the analytic curve where known."""
    model = resolve_model(model_path, gasket)
    L = resolve_cutoff(model, L)
    config = build_run_config(model, samples, seed, mode, cells_per_eps, threads, max_depth, (k,))
    radii = interior_radii(L, points)
    for r in radii:
        config.check_radius(float(r))
    overlay = analytic_overlay(model, k, L)
    rows = []
    with replica_progress("r-curve", config.samples * len(radii)) as progress:
        for r in radii:
            est = empirical_R(config, k, L, float(r), progress)
            rows.append({
                "r": fmt(r),
                "k": k,
                "emp_mean": fmt(est.mean),
                "emp_stderr": fmt(est.stderr),
                "analytic": "" if overlay is None else fmt(overlay(float(r))),
            })
    emit_csv(output, FIELDS, rows)
