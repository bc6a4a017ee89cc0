import numpy as np
import pytest

from frameseq.constructions import (
    box_profile,
    indicator_profile,
    plateau_taper_profile,
    tent_profile,
)


@pytest.fixture
def box():
    return box_profile()


@pytest.fixture
def tent():
    return tent_profile()


@pytest.fixture
def taper():
    return plateau_taper_profile(2.0, 1.0)


@pytest.fixture
def half():
    return indicator_profile(0.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
