import pytest

from bellbox.functionals import BellFunctional, make_chsh, make_inn22, orbit


@pytest.fixture(scope="session")
def chsh2_orbit():
    return sorted(orbit(make_chsh(2)), key=BellFunctional.table_key)


@pytest.fixture(scope="session")
def chsh3_orbit():
    return sorted(orbit(make_chsh(3)), key=BellFunctional.table_key)


@pytest.fixture(scope="session")
def i3322_orbit():
    return sorted(orbit(make_inn22(3)), key=BellFunctional.table_key)
