import click
from ..exact_gasket import closed_form_frac, match_gasket
from ..model_io import resolve_model
from ..renewal import scaling_data
from ..rich_utils import get_console
from .common import handle_errors, model_source

console = get_console()


@click.command("closed-form")
@model_source
@click.option("--k", "k", type=click.IntRange(0, 2), required=True, help="Curvature order.")
@handle_errors
def closed_form(model_path, gasket, k):
    """Exact mean fractal curvature for models of the gasket family."""
    model = resolve_model(model_path, gasket)
    params = match_gasket(model)
    scaling = scaling_data(model)
    value = closed_form_frac(k, params, scaling)
    console.print(f"[highlight]C_{k}^frac[/highlight] (p={params.p:g}) = {value:.5g}")
    if scaling.is_lattice:
        console.print("[muted]lattice model: this is the averaged limit[/muted]")
