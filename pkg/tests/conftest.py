"""
Shared fixtures and hypothesis profiles.

Select a profile with HYPOTHESIS_PROFILE=dev for quicker local runs.
"""

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conelab.algebras import make_algebra
from conelab.config import get_settings

settings.register_profile(
    "ci",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.register_profile(
    "dev",
    max_examples=10,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

ALGEBRA_SPECS = ["sym:2", "sym:3", "spin:4", "rn:4", "sum:sym:2+spin:3"]


@pytest.fixture(params=ALGEBRA_SPECS)
def algebra(request):
    return make_algebra(request.param)


@pytest.fixture
def sym2():
    return make_algebra("sym:2")


@pytest.fixture
def sym3():
    return make_algebra("sym:3")


@pytest.fixture
def spin4():
    return make_algebra("spin:4")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


FAST_ENV = {
    "CONELAB_OP_NORM_RESTARTS": "4",
    "CONELAB_OP_NORM_ITERATIONS": "10",
    "CONELAB_MINIMALITY_PAIRS": "2",
    "CONELAB_GROUP_COMPETITORS": "1",
    "CONELAB_MINIMALITY_INTERVALS": "256",
}


@pytest.fixture
def fast_settings(monkeypatch):
    """Smaller search budgets for end-to-end runs."""
    for name, value in FAST_ENV.items():
        monkeypatch.setenv(name, value)
    get_settings.cache_clear()
    yield get_settings()
    get_settings.cache_clear()
