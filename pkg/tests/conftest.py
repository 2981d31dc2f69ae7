import numpy as np
import pytest

from fbhmaps.domain import DomainParams, DomainPoint, sample_boundary, sample_interior

ACCEPTANCE_LINES = []


def mixed_points(params, seed, count):
    """Half interior, half boundary sample points."""
    a = sample_interior(params, seed, count - count // 2)
    b = sample_boundary(params, seed + 1, count // 2)
    return DomainPoint(np.concatenate([a.z, b.z]), np.concatenate([a.w, b.w]))


def cgauss(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[0.5, 1.0, 2.0], ids=lambda mu: f"mu={mu}")
def params3(request):
    return DomainParams(3, 1, request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
