import numpy as np
import pytest

from convtact import ConvShape, conv_direct

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    # compile the rank-specialized loops once so no timed test pays for it;
    # FULL and VALID together touch both the zpad and the valid variants
    for ndim in (1, 2, 3):
        s = np.ones((4,) * ndim)
        k = np.ones((2,) * ndim)
        conv_direct(s, k, ConvShape.FULL)
        conv_direct(s, k, ConvShape.VALID)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
