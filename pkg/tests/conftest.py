import pytest

from helpers import presidential_kb


@pytest.fixture
def pres_kb():
    return presidential_kb()
