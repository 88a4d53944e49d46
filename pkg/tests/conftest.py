import pytest

import mpoly


@pytest.fixture(autouse=True)
def default_tolerance():
    mpoly.reset_tolerance()
    yield
    mpoly.reset_tolerance()
