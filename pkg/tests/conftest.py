import math

import numpy as np
import pytest

from decolab.core import QubitAmplitudes

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_system(rng: np.random.Generator) -> QubitAmplitudes:
    x = rng.normal(size=4)
    x /= math.sqrt(float(np.dot(x, x)))
    return QubitAmplitudes(complex(x[0], x[1]), complex(x[2], x[3]))


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
