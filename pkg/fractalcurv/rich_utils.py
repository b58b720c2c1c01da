from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.theme import Theme

_theme = Theme({
    "success": "bold green",
    "warning": "bold yellow",
    "error": "bold red",
    "highlight": "bold cyan",
    "muted": "dim",
})

_console = Console(theme=_theme)
_err_console = Console(theme=_theme, stderr=True)


def get_console() -> Console:
    return _console


def get_err_console() -> Console:
    return _err_console


def make_progress() -> Progress:
    """Replica progress bar drawn on standard error."""
    return Progress(
        TextColumn("[highlight]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=_err_console,
        transient=True,
    )
