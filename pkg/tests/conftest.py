import numpy as np
import pytest

from nmcorr import GammaSet, SpectralDensity, tabulate, two_level

# Reference scenario shared across the suite: two-level emitter, splitting 3,
# lowering coupling, Ohmic bath gamma=0.1 / cutoff=5 at kT=1, t2=1.
OMEGA_A = 3.0
GAMMA = 0.1
CUTOFF = 5.0
KT = 1.0
T2 = 1.0


@pytest.fixture(scope="session")
def sd():
    return SpectralDensity(gamma=GAMMA, cutoff=CUTOFF)


@pytest.fixture(scope="session")
def table12(sd):
    """Bath table long enough for runs up to t1 = 11.5."""
    return tabulate(sd, KT, 12.0, 0.005)


@pytest.fixture(scope="session")
def gammas12(table12):
    return GammaSet(table12, [OMEGA_A])


@pytest.fixture(scope="session")
def model():
    return two_level(OMEGA_A)


@pytest.fixture(scope="session")
def rho0():
    psi = np.array([np.sqrt(3.0) / 2.0, 0.5], dtype=complex)
    return np.outer(psi, psi.conj())
