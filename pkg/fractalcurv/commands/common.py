"""Options and helpers shared by the experiment commands."""
import functools
from contextlib import contextmanager

import click

from ..core import get_config_value, resolve_threads
from ..errors import FractalCurvError
from ..montecarlo import MODES, RunConfig, Schedule
from ..output import render_csv, write_csv_atomic
from ..rich_utils import get_console, get_err_console, make_progress

console = get_console()


class CommandError(click.ClickException):
    """ClickException carrying the exit code of the library error it wraps."""

    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FractalCurvError as e:
            raise CommandError(str(e), e.exit_code) from e
    return wrapper


class ScheduleType(click.ParamType):
    name = "START:RATIO:COUNT"

    def convert(self, value, param, ctx):
        if isinstance(value, Schedule):
            return value
        try:
            return Schedule.parse(value)
        except FractalCurvError as e:
            self.fail(str(e), param, ctx)


class KSetType(click.ParamType):
    name = "K[,K...]"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            ks = tuple(int(part) for part in value.split(",") if part.strip())
        except ValueError:
            self.fail(f"expected comma-separated orders, got {value!r}", param, ctx)
        if not ks or any(k not in (0, 1, 2) for k in ks):
            self.fail(f"orders must come from 0, 1, 2, got {value!r}", param, ctx)
        return ks


SCHEDULE = ScheduleType()
K_SET = KSetType()


def model_source(fn):
    fn = click.option("--gasket", type=float, default=None,
                      help="Use the built-in gasket family with mixing probability P.")(fn)
    fn = click.argument("model_path", required=False, type=click.Path(exists=True, dir_okay=False))(fn)
    return fn


def run_options(fn):
    for decorator in reversed([
        click.option("--samples", type=int, default=None, help="Replicas per radius (config: samples)."),
        click.option("--seed", type=int, default=0, show_default=True, help="Master seed."),
        click.option("--mode", type=click.Choice(MODES), default="homogeneous", show_default=True),
        click.option("--cells-per-eps", type=int, default=None, help="Grid cells per radius (config: cells_per_eps)."),
        click.option("--threads", type=int, default=None, help="Worker threads (env FCL_THREADS, config: threads)."),
        click.option("--max-depth", type=int, default=None, help="Deepest code word allowed (config: max_depth)."),
    ]):
        fn = decorator(fn)
    return fn


def build_run_config(model, samples, seed, mode, cells_per_eps, threads, max_depth, k_set=(0, 1, 2)) -> RunConfig:
    """Flags override config.json, which overrides the built-in defaults."""
    return RunConfig(
        model=model,
        mode=mode,
        samples=samples if samples is not None else int(get_config_value("samples")),
        master_seed=seed,
        cells_per_eps=cells_per_eps if cells_per_eps is not None else int(get_config_value("cells_per_eps")),
        k_set=k_set,
        max_depth=max_depth if max_depth is not None else int(get_config_value("max_depth")),
        min_eps=float(get_config_value("min_eps")),
        threads=resolve_threads(threads),
    )


@contextmanager
def replica_progress(description, total):
    """Yield a progress callback that advances a bar by one replica per call."""
    with make_progress() as progress:
        task = progress.add_task(description, total=total)

        def advance(done, n):
            progress.advance(task)

        yield advance


def emit_csv(output, fieldnames, rows):
    rows = list(rows)
    if output:
        write_csv_atomic(output, fieldnames, rows)
        console.print(f"[success]Wrote[/success] {len(rows)} rows to [highlight]{output}[/highlight]")
    else:
        click.echo(render_csv(fieldnames, rows), nl=False)


def summary_console(output):
    """Summaries go to stderr when the CSV itself is written to stdout."""
    return console if output else get_err_console()
