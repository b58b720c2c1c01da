import sys

import click

from .core import ensure_dirs, configure_logging
from .commands.audit_cmd import audit
from .commands.closed_form_cmd import closed_form
from .commands.compare_modes_cmd import compare_modes
from .commands.config_cmd import config_group
from .commands.dimension_cmd import dimension
from .commands.misc_cmds import init, path
from .commands.probe_cmd import probe
from .commands.r_curve_cmd import r_curve_cmd
from .commands.simulate_cmd import simulate


@click.group()
def cli():
    """Mean fractal curvatures of homogeneous and recursive random fractals."""
    ensure_dirs()
    configure_logging()


# register config subgroup
cli.add_command(config_group, name="config")

# root commands
cli.add_command(dimension)
cli.add_command(closed_form, name="closed-form")
cli.add_command(r_curve_cmd, name="r-curve")
cli.add_command(simulate)
cli.add_command(compare_modes, name="compare-modes")
cli.add_command(audit)
cli.add_command(probe)
cli.add_command(init)
cli.add_command(path)


def run(argv=None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="fractalcurv", standalone_mode=True)
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0


def main():
    sys.exit(run())
