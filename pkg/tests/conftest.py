import json
from importlib import resources

import numpy as np
import pytest


def random_density(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def printed_matrices():
    """Raw fixture document, in its own (HV, HH, VV, VH) order."""
    text = resources.files("biphoton_bench").joinpath("data/published_density_matrices.json").read_text()
    return json.loads(text)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
