import numpy as np
import pytest
from kou_pide.model import get_parameter_set
from kou_pide.steppers import build_problem
from kou_pide.util.io import CACHE_DIR_ENV

SMALL_M = 12


@pytest.fixture
def params():
    return get_parameter_set('set1').params


@pytest.fixture
def small_problem(params):
    return build_problem(params, SMALL_M, SMALL_M)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(autouse=True)
def no_cache_env(monkeypatch):
    # reference solutions are cached under the test's own directories only
    monkeypatch.delenv(CACHE_DIR_ENV, raising=False)
