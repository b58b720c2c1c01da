"""
Pytest configuration and fixtures for fractalcurv tests.
"""
import pytest


@pytest.fixture
def fcl_home(tmp_path, monkeypatch):
    """
    Creates an isolated fractalcurv home directory for testing.
    Sets FCL_HOME so every core path resolves inside tmp_path.
    """
    home = tmp_path / ".fractalcurv"
    monkeypatch.setenv("FCL_HOME", str(home))
    monkeypatch.delenv("FCL_THREADS", raising=False)

    from fractalcurv import core
    core.ensure_dirs()
    return home


@pytest.fixture
def cli_runner():
    """
    Provides a Click CLI test runner.
    """
    from click.testing import CliRunner
    return CliRunner()


@pytest.fixture
def gasket_p1():
    """Deterministic Sierpinski gasket (only G has mass)."""
    from fractalcurv.exact_gasket import gasket_model
    return gasket_model(1.0)


@pytest.fixture
def gasket_p0():
    """Deterministic six-map gasket (only H has mass)."""
    from fractalcurv.exact_gasket import gasket_model
    return gasket_model(0.0)


@pytest.fixture
def gasket_half():
    """Random gasket mixing G and H with equal probability."""
    from fractalcurv.exact_gasket import gasket_model
    return gasket_model(0.5)


@pytest.fixture
def model_file(tmp_path, gasket_half):
    """The p = 0.5 gasket written as a model document."""
    from fractalcurv.model_io import save_model
    path = tmp_path / "gasket_p05.json"
    save_model(path, gasket_half)
    return path
