import numpy as np
import pytest

from _oracles import SEED


@pytest.fixture
def rng():
    """Fresh deterministic generator per test."""
    return np.random.default_rng(SEED)
