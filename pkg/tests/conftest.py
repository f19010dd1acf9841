import pytest
from click.testing import CliRunner

from poisson_widths.kernels import KernelParams


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def half():
    return KernelParams(0.5, 0.0)


@pytest.fixture
def skew():
    return KernelParams(0.3, 0.7)
