"""
Pytest configuration and fixtures
"""
import pytest
from hypothesis import HealthCheck, settings

from tests.helpers import make_setup

# Configure Hypothesis globally to suppress health checks
settings.register_profile(
    "default",
    suppress_health_check=[
        HealthCheck.function_scoped_fixture,
        HealthCheck.filter_too_much,
    ],
    deadline=10000,  # 10 seconds for numerically heavy examples
)
settings.load_profile("default")


@pytest.fixture
def small_setup():
    """n=4, M=16 winding setup over T=0.1"""
    return make_setup()
