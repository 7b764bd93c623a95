import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hvwmark.analysis import DecodeOp
from hvwmark.diffusion import error_diffuse, kernel_lookup
from hvwmark.embed import DhcedConfig, EmbedConfig, embed_cadeed, embed_dhced, embed_dhdced
from hvwmark.images import BitImage, GrayImage

import assets

# pass/fail lines collected by the acceptance tests and echoed after the
# run so they are visible regardless of output capture
acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm_numba():
    """Compile (or load from cache) every jitted kernel on tiny inputs so
    timed tests measure the algorithms, not compilation."""
    rng = np.random.default_rng(0)
    x = GrayImage(rng.integers(0, 256, (8, 8), dtype=np.uint8))
    wm = BitImage(np.where(rng.random((8, 8)) < 0.5, 0, 255).astype(np.uint8))
    for name in ("steinberg", "jarvis"):
        kernel = kernel_lookup(name)
        error_diffuse(x, kernel)
        embed_cadeed(x, x, wm, EmbedConfig(lam=1e-3, kernel=kernel))
        embed_dhced(x, x, wm, DhcedConfig(budget=20.0, kernel=kernel))
        embed_dhdced(x, x, wm, DhcedConfig(budget=20.0, kernel=kernel))


@pytest.fixture(scope="session")
def covers():
    return dict(assets.cover_images())


@pytest.fixture(scope="session")
def pattern():
    return assets.secret_pattern()


@pytest.fixture(scope="session")
def steinberg():
    return kernel_lookup("steinberg")


@pytest.fixture(scope="session")
def jarvis():
    return kernel_lookup("jarvis")


@pytest.fixture(scope="session")
def ops():
    return (DecodeOp.AND, DecodeOp.XNOR)
