import click
from ..core import ensure_dirs, home
from ..rich_utils import get_console

console = get_console()


@click.command()
def init():
    """Create the fractalcurv home folder and default config if missing."""
    ensure_dirs()
    console.print(f"[success]Initialized fractalcurv at[/success] [highlight]{home()}[/highlight]")


@click.command()
def path():
    """Show the current fractalcurv home path."""
    ensure_dirs()
    console.print(f"{home()}", highlight=False)
