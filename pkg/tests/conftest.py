import numpy as np
import pytest

from lightlayers import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def restore_backend():
    """Let a test switch kernel backends and put the default back after."""
    previous = kernels.active_backend()
    yield kernels.use_backend
    kernels.use_backend(previous)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance criteria (slowest tests)"
    )
