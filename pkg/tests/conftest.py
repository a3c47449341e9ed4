import random

import pytest

from pan_domain.group import get_group


@pytest.fixture
def toy():
    return get_group("modp_toy")


@pytest.fixture
def curve():
    return get_group("curve25519")


@pytest.fixture
def rng():
    return random.Random(20201016)
