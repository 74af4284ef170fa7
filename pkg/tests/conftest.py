from __future__ import annotations

import math

import numpy as np
import pytest

from reebtube import jacobi
from reebtube import structures as st

SQRT_2PI = math.sqrt(2.0 * math.pi)


@pytest.fixture(scope="session")
def heis():
    return st.heisenberg()


@pytest.fixture(scope="session")
def ot():
    return st.overtwisted()


@pytest.fixture(scope="session")
def kc1():
    return st.kcontact(1.0)


@pytest.fixture(scope="session")
def kcm1():
    return st.kcontact(-1.0)


@pytest.fixture(scope="session")
def heis_trace(heis):
    return jacobi.jacobi_trace(heis, r_max=10.0, samples_per_unit=1024)


@pytest.fixture(scope="session")
def ot_trace(ot):
    return jacobi.jacobi_trace(ot, r_max=3.2)


@pytest.fixture(scope="session")
def kc1_trace(kc1):
    return jacobi.jacobi_trace(kc1, r_max=3.4)


@pytest.fixture(scope="session")
def kcm1_trace(kcm1):
    return jacobi.jacobi_trace(kcm1, r_max=2.7)


@pytest.fixture(scope="session")
def probe_points():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2.0, 2.0, size=(100, 3))
    # keep probes off the axis so cylindrical frames stay regular
    keep = np.hypot(pts[:, 0], pts[:, 1]) > 0.1
    return pts[keep]
