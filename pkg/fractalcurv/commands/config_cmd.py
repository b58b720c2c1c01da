import click, json
from ..core import DEFAULT_CONFIG, load_config, save_config
from ..rich_utils import get_console

console = get_console()


@click.group()
def config_group():
    """Manage fractalcurv configuration."""
    pass


@config_group.command("get")
@click.argument("key")
def config_get(key):
    cfg = load_config()
    if key in cfg:
        console.print(f"[highlight]{key}:[/highlight] {json.dumps(cfg[key])}")
    elif key in DEFAULT_CONFIG:
        console.print(f"[highlight]{key}:[/highlight] {json.dumps(DEFAULT_CONFIG[key])} [muted](default)[/muted]")
    else:
        console.print(f"[warning]Key '{key}' not found in config[/warning]")


@config_group.command("set")
@click.argument("key")
@click.argument("value")
def config_set(key, value):
    cfg = load_config()
    try:
        cfg[key] = json.loads(value)
    except Exception:
        cfg[key] = value
    save_config(cfg)
    console.print(f"[success]Config updated:[/success] [highlight]{key}[/highlight] = {json.dumps(cfg[key])}")


@config_group.command("list")
def config_list():
    """Show every setting with its effective value."""
    cfg = load_config()
    for key in sorted(set(DEFAULT_CONFIG) | set(cfg)):
        if key in cfg:
            console.print(f"  [highlight]{key:14}[/highlight] {json.dumps(cfg[key])}")
        else:
            console.print(f"  [highlight]{key:14}[/highlight] {json.dumps(DEFAULT_CONFIG[key])} [muted](default)[/muted]")
