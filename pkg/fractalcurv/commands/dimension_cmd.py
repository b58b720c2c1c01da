import click
from ..model_io import resolve_model
from ..renewal import scaling_data
from ..rich_utils import get_console
from .common import handle_errors, model_source

console = get_console()


@click.command()
@model_source
@handle_errors
def dimension(model_path, gasket):
    """Print D, D_H, eta and the lattice span of a model."""
    model = resolve_model(model_path, gasket)
    s = scaling_data(model)
    console.print(f"[highlight]D[/highlight] = {s.D:.10f}")
    console.print(f"[highlight]D_H[/highlight] = {s.D_H:.10f}")
    console.print(f"[highlight]eta[/highlight] = {s.eta:.10f}")
    if s.lattice_span is None:
        console.print("[highlight]lattice c[/highlight] = none [muted](non-lattice)[/muted]")
    else:
        console.print(f"[highlight]lattice c[/highlight] = {s.lattice_span:.10f}")
