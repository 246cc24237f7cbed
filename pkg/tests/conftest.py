import numpy as np
import pytest

from voigtblowup.spectral import GridSpec, dealias, leray_project, to_spectral


def random_field(grid, ncomp=None, seed=0, smooth=True, solenoidal=False):
    """Random real field; optionally dealiased and divergence-free, always zero-mean."""
    rng = np.random.default_rng(seed)
    ncomp = ncomp or (3 if grid.dim == 3 else 1)
    f = to_spectral(rng.standard_normal((ncomp,) + grid.shape), grid)
    f.coeffs[(slice(None),) + (0,) * grid.dim] = 0
    if smooth:
        f = dealias(f)
    if solenoidal:
        f = leray_project(f)
    return f


@pytest.fixture
def cube16():
    return GridSpec.cube(16)


@pytest.fixture
def line64():
    return GridSpec.line(64)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
