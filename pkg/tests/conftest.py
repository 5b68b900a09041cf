import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=(HealthCheck.too_slow,))
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def _oracle_cache(tmp_path, monkeypatch):
    # keep the oracle sidecar out of the user's home during tests
    monkeypatch.setenv("VIFW_CACHE_DIR", str(tmp_path / "cache"))
