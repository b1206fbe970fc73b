import numpy as np
import pytest

import rpsim as rp


@pytest.fixture
def prototype():
    """Default system with the field perpendicular to the tensor axis."""
    return rp.prototype_system(theta=np.pi / 2)


@pytest.fixture
def prototype_polar():
    return rp.prototype_system(theta=0.0)
