import numpy as np
import pytest

from levymoments import BernsteinSpec


@pytest.fixture(scope="session")
def catalog():
    """The non-custom catalog families with default parameters."""
    return {
        "log1p": BernsteinSpec.log1p(),
        "power": BernsteinSpec.power(0.5),
        "shifted_power": BernsteinSpec.shifted_power(0.5),
        "loglog": BernsteinSpec.loglog(),
        "truncated_gamma": BernsteinSpec.truncated_gamma(),
        "linear": BernsteinSpec.linear(1.0),
    }


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
