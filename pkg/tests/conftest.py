import numpy as np
import pytest

from elastoinv.medium import make_medium


@pytest.fixture
def medium():
    """The planar and 3D reference solid: lambda=2, mu=1, rho=1 (c_p=2, c_s=1)."""
    return make_medium(2.0, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdicts (one line per criterion) after the run."""
    import sys

    lines = []
    for mod in list(sys.modules.values()):
        lines.extend(getattr(mod, "ACCEPTANCE_LINES", []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
