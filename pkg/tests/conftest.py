import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from degeo import SystemSpec, named_graph


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def triangle():
    return SystemSpec(named_graph("triangle"), 2)


@pytest.fixture(scope="session")
def square():
    return SystemSpec(named_graph("square"), 2)


@pytest.fixture(scope="session")
def tetrahedron():
    return SystemSpec(named_graph("tetrahedron"), 2)


@pytest.fixture(scope="session")
def cuboctahedron():
    return SystemSpec(named_graph("cuboctahedron"), 2)


def tetra_symmetric_orbitals():
    """The symmetric orbital choice for the complete graph on 4 vertices."""
    phi0 = 0.5 * np.array([1.0, 1.0, 1.0, 1.0])
    phi1 = 0.5 * np.array([-1.0, -1.0, 1.0, 1.0])
    phi2 = 0.5 * np.array([-1.0, 1.0, -1.0, 1.0])
    phi3 = 0.5 * np.array([1.0, -1.0, -1.0, 1.0])
    return phi0, phi1, phi2, phi3


def square_symmetric_orbitals():
    """Orbital basis of the 4-cycle whose degenerate pair is the balanced one."""
    phi0 = 0.5 * np.array([1.0, 1.0, 1.0, 1.0])
    phi1 = 0.5 * np.array([1.0, 1.0, -1.0, -1.0])
    phi2 = 0.5 * np.array([1.0, -1.0, -1.0, 1.0])
    return phi0, phi1, phi2
