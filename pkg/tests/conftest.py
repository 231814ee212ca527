import math

import pytest

from capstab import profiles


@pytest.fixture(scope="session")
def hemisphere():
    return profiles.spherical_cap(2, math.pi / 2, samples=1200)


@pytest.fixture(scope="session")
def cap60():
    return profiles.spherical_cap(2, math.pi / 3, samples=1200)


@pytest.fixture(scope="session")
def cyl_short():
    return profiles.cylinder(2, 1.0, 2.5, samples=800)


@pytest.fixture(scope="session")
def cyl_tall():
    return profiles.cylinder(2, 1.0, 3.5, samples=800)


@pytest.fixture(scope="session")
def undu_half():
    return profiles.unduloid_slab(2, 0.5, 0.7, period="half", samples=1200)


@pytest.fixture(scope="session")
def undu_full():
    return profiles.unduloid_slab(3, 2.0 / 3.0, 0.75, period="full", samples=1600)
