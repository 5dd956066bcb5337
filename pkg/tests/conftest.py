import random

import numpy as np
import pytest

from glyphometrics import fixtures


@pytest.fixture(scope="session")
def worked():
    return fixtures.worked_character()


@pytest.fixture(scope="session")
def square():
    return fixtures.square_glyph()


@pytest.fixture(scope="session")
def circle():
    return fixtures.circle_glyph()


@pytest.fixture(scope="session")
def s_shape():
    return fixtures.s_glyph()


@pytest.fixture()
def rng():
    return random.Random(1234)


@pytest.fixture()
def nprng():
    return np.random.default_rng(1234)
