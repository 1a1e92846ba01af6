import sys
from pathlib import Path as FsPath

import numpy as np
import pytest

import ompath as om

sys.path.insert(0, str(FsPath(__file__).parent))


@pytest.fixture
def ms1():
    return om.maier_stein(1.0)


@pytest.fixture(scope="session")
def bench_system():
    return om.benchmark_system()


@pytest.fixture(scope="session")
def bench_eta(bench_system):
    return om.eta(bench_system.levy)


@pytest.fixture
def transition_boundary():
    return om.BoundaryPair(np.array([1.0, 0.0]), np.array([-1.0, 0.0]), T=1.0)


@pytest.fixture
def free_particle_2d():
    return om.SystemSpec(
        drift=om.zero_drift(2),
        noise=om.NoiseMatrix.identity(2),
        levy=(om.null_component(), om.null_component()),
        x0=np.zeros(2),
    )


def make_ou_1d(rate: float = 1.0, b: float = 1.0, x0: float = 0.0):
    """1D linear drift f(x) = -rate * x with scalar noise b."""
    return om.SystemSpec(
        drift=om.polynomial_drift(1, [[[-rate, 1]]]),
        noise=om.NoiseMatrix(np.array([[b]])),
        levy=(om.null_component(),),
        x0=np.array([x0]),
    )


def make_bm_1d(b: float = 1.0, x0: float = 0.0):
    """Driftless 1D system (Brownian motion scaled by b)."""
    return om.SystemSpec(
        drift=om.zero_drift(1),
        noise=om.NoiseMatrix(np.array([[b]])),
        levy=(om.null_component(),),
        x0=np.array([x0]),
    )
