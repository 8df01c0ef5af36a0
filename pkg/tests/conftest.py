import pytest

from msrcode.construction import build_code
from msrcode.params import validate


@pytest.fixture(scope="session")
def ex1():
    """(n, k, d) = (6, 4, 5) over GF(2^8)."""
    return build_code(validate(2, 2, 8))


@pytest.fixture(scope="session")
def ex2():
    """(n, k, d) = (9, 6, 8) over GF(2^16)."""
    return build_code(validate(2, 3, 16))


@pytest.fixture(scope="session")
def tiny():
    return build_code(validate(1, 2, 8))


@pytest.fixture(params=["ex1", "ex2", "tiny"])
def code(request):
    return request.getfixturevalue(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
