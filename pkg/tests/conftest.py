import numpy as np
import pytest

from framelab.bounds import empirical_frame_bounds
from framelab.geometry import HALFPLANE, PLANE
from framelab.kernels import kernel_field
from framelab.pointsets import lattice
from framelab.signals import DEFAULT_Q, gaussian, mexican_hat, normalize_wavelet

# Gaussian integrands are resolved far below double precision at this step, so
# the slower sweeps use it; grids and supports stay at their defaults.
FAST_Q = DEFAULT_Q.with_(dt=0.05)

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def record():
    """Store one acceptance line; printed together at the end of the session."""

    def _record(number: int, title: str, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        _CRITERIA[number] = f"criterion {number:2d} [{status}] {title}" + (f" :: {detail}" if detail else "")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])


@pytest.fixture(scope="session")
def q():
    return DEFAULT_Q


@pytest.fixture(scope="session")
def gauss():
    return gaussian()


@pytest.fixture(scope="session")
def mh():
    return normalize_wavelet(mexican_hat())


@pytest.fixture(scope="session")
def half_lattice():
    return lattice(PLANE, 0.5, 0.5)


@pytest.fixture(scope="session")
def kf_gauss(gauss):
    return kernel_field(gauss, PLANE)


@pytest.fixture(scope="session")
def kf_mh(mh):
    return kernel_field(mh, HALFPLANE)


@pytest.fixture(scope="session")
def emp_half(gauss, half_lattice):
    return empirical_frame_bounds(gauss, half_lattice)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
