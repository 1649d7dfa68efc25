import numpy as np
import pytest
from scipy.stats import unitary_group

from orthoclone.qstate import DensityMatrix, Unitary


def random_density(rng, dim, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m /= np.trace(m)
    return DensityMatrix(0.5 * (m + m.conj().T))


def random_unitary(rng, dim):
    # Haar sampler from scipy; independent of the package's own parameterization
    return Unitary(unitary_group.rvs(dim, random_state=rng))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria log, printed at the end of the run ---------------------

ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_LOG):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} -- {detail}")
