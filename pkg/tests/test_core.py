"""
Tests for fractalcurv.core - home directory, config and logging.
"""
import json
import logging

from fractalcurv import core


class TestHome:
    """Tests for home directory resolution."""

    def test_env_override(self, fcl_home):
        assert core.home() == fcl_home
        assert core.config_file() == fcl_home / "config.json"
        assert core.logs_dir() == fcl_home / "logs"

    def test_ensure_dirs_writes_version(self, fcl_home):
        assert json.loads(core.config_file().read_text()) == {"version": 1}
        assert core.logs_dir().is_dir()

    def test_ensure_dirs_keeps_existing_config(self, fcl_home):
        core.save_config({"version": 1, "samples": 7})
        core.ensure_dirs()
        assert core.load_config()["samples"] == 7


class TestConfigValues:
    """Tests for config lookups."""

    def test_defaults(self, fcl_home):
        assert core.get_config_value("samples") == 200
        assert core.get_config_value("cells_per_eps") == 32
        assert core.get_config_value("unknown", "fallback") == "fallback"

    def test_stored_value_wins(self, fcl_home):
        core.save_config({"version": 1, "min_eps": 0.01})
        assert core.get_config_value("min_eps") == 0.01

    def test_atomic_write_leaves_no_tmp(self, fcl_home):
        core.save_config({"version": 1})
        assert not list(fcl_home.glob("*.tmp"))


class TestResolveThreads:
    """Tests for the worker-count precedence."""

    def test_flag_first(self, fcl_home, monkeypatch):
        monkeypatch.setenv("FCL_THREADS", "3")
        assert core.resolve_threads(2) == 2

    def test_env_second(self, fcl_home, monkeypatch):
        monkeypatch.setenv("FCL_THREADS", "3")
        core.save_config({"version": 1, "threads": 6})
        assert core.resolve_threads() == 3

    def test_config_third(self, fcl_home):
        core.save_config({"version": 1, "threads": 6})
        assert core.resolve_threads() == 6

    def test_automatic(self, fcl_home):
        assert core.resolve_threads() is None

    def test_bad_env_falls_back(self, fcl_home, monkeypatch):
        monkeypatch.setenv("FCL_THREADS", "many")
        assert core.resolve_threads() is None


class TestLogging:
    """Tests for configure_logging."""

    def test_idempotent(self, fcl_home):
        first = core.configure_logging()
        count = len(first.handlers)
        second = core.configure_logging()
        assert first is second is logging.getLogger("fractalcurv")
        assert len(second.handlers) == count >= 2
