import pytest

from funcfield.multizeta.configuration import (
    CONFIGURATION_PATH_ENVIRONMENT_VARIABLE,
    MAX_FIELD_ENVIRONMENT_VARIABLE,
)
from funcfield.multizeta.gf import color_field
from funcfield.multizeta.ringa import function_field
from funcfield.multizeta.scalars import UniformizerSpec


@pytest.fixture(autouse=True)
def unconfigured(monkeypatch):
    """Run every test with the built-in limits."""
    monkeypatch.delenv(CONFIGURATION_PATH_ENVIRONMENT_VARIABLE, raising=False)
    monkeypatch.delenv(MAX_FIELD_ENVIRONMENT_VARIABLE, raising=False)


@pytest.fixture()
def f3():
    """F_3."""
    return color_field(3, 1)


@pytest.fixture()
def f2():
    """F_2."""
    return color_field(2, 1)


@pytest.fixture()
def u3(f3):
    """Depth 0 uniformizer over F_3, one digit of 1/theta is 2 v-exponents."""
    return UniformizerSpec(3, 0, f3)


@pytest.fixture()
def u3_1(f3):
    """Depth 1 uniformizer over F_3, one digit of 1/theta is 6 v-exponents."""
    return UniformizerSpec(3, 1, f3)


@pytest.fixture()
def u2(f2):
    """Depth 0 uniformizer over F_2."""
    return UniformizerSpec(2, 0, f2)


@pytest.fixture()
def a3(f3):
    """F_3[theta]."""
    return function_field(3, f3)
