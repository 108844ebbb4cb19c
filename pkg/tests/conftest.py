import os

import pytest
from hypothesis import HealthCheck, settings

from syzmirror.presets import load_preset

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def presets():
    from syzmirror.presets import PRESET_NAMES

    return {name: load_preset(name) for name in PRESET_NAMES}
