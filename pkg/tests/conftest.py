from __future__ import annotations

import math

import pytest

from csbubble.config import preset_config
from csbubble.integrator import Controls
from csbubble.scalar import solve_scalar
from csbubble.shooter import shoot


@pytest.fixture(scope="session")
def su3():
    return preset_config("su3-ref").params()


@pytest.fixture(scope="session")
def su3_scalar(su3):
    return solve_scalar(su3, 3.0, Controls())


@pytest.fixture(scope="session")
def su3_report(su3, su3_scalar):
    """Generic-case run at a height small enough for the limit picture."""
    return shoot(su3, (1.5, 3.0), 1e-6, su3_scalar.V0, Controls())


@pytest.fixture(scope="session")
def vacuum_level():
    return -math.log(2.0)
