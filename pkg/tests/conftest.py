import numpy as np
import pytest

from bandreach import NoiseTables, build_grid, parse_config


@pytest.fixture(scope="session")
def default_config():
    return parse_config("")


@pytest.fixture(scope="session")
def default_link(default_config):
    """(config, grid, bands, tables) for the built-in 2720-channel system."""
    grid, bands = build_grid(default_config)
    tables = NoiseTables.build(grid, default_config.fiber, default_config.amplifier,
                               default_config.reference_bandwidth_hz)
    return default_config, grid, bands, tables


@pytest.fixture(scope="session")
def toy3_link():
    """3-channel toy system used by the GN-integral oracle comparisons."""
    config = parse_config("signal.fsu_count = 3")
    grid, bands = build_grid(config)
    tables = NoiseTables.build(grid, config.fiber, config.amplifier,
                               config.reference_bandwidth_hz)
    return config, grid, bands, tables


@pytest.fixture(scope="session")
def band_map(default_link):
    _, _, bands, _ = default_link
    return {band.name: band for band in bands}


def assert_rel(actual, expected, rel, label=""):
    actual = float(actual)
    expected = float(expected)
    err = abs(actual - expected) / abs(expected)
    assert err <= rel, f"{label}: {actual} vs {expected} (rel err {err:.3g} > {rel})"


@pytest.fixture(scope="session")
def sweep_dbm(default_config):
    return np.asarray(default_config.sweep_powers_dbm())
