import time

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

_CACHE = {}


@pytest.fixture(scope="session")
def preset_results():
    """Memoized preset runner: returns (result, elapsed_seconds)."""
    import nhlattice as nh

    def get(name):
        if name not in _CACHE:
            t0 = time.perf_counter()
            result = nh.run_preset(name)
            _CACHE[name] = (result, time.perf_counter() - t0)
        return _CACHE[name]

    return get
