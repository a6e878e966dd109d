import numpy as np
import pytest

from mterm_lab._kernels import available_backends

BACKENDS = available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def kernels(request):
    """Each compiled/pure kernel module in turn."""
    return BACKENDS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
