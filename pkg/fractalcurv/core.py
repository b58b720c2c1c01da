from pathlib import Path
import os, json, logging
from logging.handlers import RotatingFileHandler

from rich.logging import RichHandler

from .rich_utils import get_err_console

HOME_ENV = "FCL_HOME"
THREADS_ENV = "FCL_THREADS"

DEFAULT_CONFIG = {
    "samples": 200,
    "cells_per_eps": 32,
    "max_depth": 64,
    "min_eps": 1e-3,
    "threads": None,
}


def home() -> Path:
    env_root = os.environ.get(HOME_ENV)
    return Path(env_root) if env_root else Path(os.path.expanduser("~/.fractalcurv"))


def config_file() -> Path:
    return home() / "config.json"


def logs_dir() -> Path:
    return home() / "logs"


def ensure_dirs():
    home().mkdir(parents=True, exist_ok=True)
    logs_dir().mkdir(parents=True, exist_ok=True)
    if not config_file().exists():
        _write_json_atomic(config_file(), {"version": 1})


def configure_logging():
    logger = logging.getLogger("fractalcurv")
    if logger.handlers:
        return logger
    logger.setLevel(logging.INFO)
    handler = RotatingFileHandler(logs_dir() / "fractalcurv.log", maxBytes=1024 * 1024, backupCount=3)
    handler.setFormatter(logging.Formatter(
        "%(asctime)s | %(levelname)s | %(message)s",
        datefmt="%Y-%m-%dT%H:%M:%SZ",
    ))
    logger.addHandler(handler)
    console_handler = RichHandler(console=get_err_console(), show_path=False, show_time=False)
    console_handler.setLevel(logging.WARNING)
    logger.addHandler(console_handler)
    return logger


def _write_json_atomic(path: Path, data):
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with open(tmp_path, "w") as f:
        json.dump(data, f, indent=2)
    os.replace(tmp_path, path)


def load_config():
    ensure_dirs()
    with open(config_file(), "r") as f:
        return json.load(f)


def save_config(cfg):
    ensure_dirs()
    _write_json_atomic(config_file(), cfg)


def get_config_value(key, default=None):
    """Value from config.json, falling back to the built-in default for known keys."""
    cfg = load_config()
    if cfg.get(key) is not None:
        return cfg[key]
    return DEFAULT_CONFIG.get(key, default)


def resolve_threads(flag=None):
    """Worker count: explicit flag, then FCL_THREADS, then config; None means automatic."""
    if flag:
        return int(flag)
    env_value = os.environ.get(THREADS_ENV)
    if env_value:
        try:
            return max(1, int(env_value))
        except ValueError:
            logging.getLogger("fractalcurv").warning(f"ignoring bad thread count | {THREADS_ENV}={env_value!r}")
    value = get_config_value("threads")
    return int(value) if value else None
