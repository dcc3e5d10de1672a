import pytest

import scalelab

from .constants import FAST_SETTINGS


@pytest.fixture(autouse=True)
def isolate_output_dir(monkeypatch):
    """Runs must not pick up an output directory from the environment."""
    monkeypatch.delenv("SCALELAB_OUTPUT_DIR", raising=False)


@pytest.fixture
def settings():
    return FAST_SETTINGS


@pytest.fixture
def canonical_d3():
    return scalelab.PowerLaw(1.0, scalelab.canonical_exponent(3))


@pytest.fixture
def canonical_d4():
    return scalelab.PowerLaw(1.0, scalelab.canonical_exponent(4))
