import numpy as np
import pytest

from abmetric.fixtures import builtin
from abmetric.scalars import PhiSpec

BUILTIN_PHIS = {
    "riemannian": PhiSpec.riemannian(),
    "randers": PhiSpec.randers(),
    "power1": PhiSpec.power(1),
    "power2": PhiSpec.power(2),
    "quadratic": PhiSpec.quadratic(),
    "randers_type": PhiSpec.randers_type(1.0, 0.5, 0.3),
}


@pytest.fixture(params=sorted(BUILTIN_PHIS))
def phi(request):
    return BUILTIN_PHIS[request.param]


@pytest.fixture
def fixture_by_name():
    return builtin


def assert_close(actual, expected, rtol=0.0, atol=0.0):
    np.testing.assert_allclose(np.asarray(actual, dtype=float), np.asarray(expected, dtype=float),
                               rtol=rtol, atol=atol)


_ACCEPTANCE = {}


class _Gate:
    """Records PASS when the block completes and FAIL with the error otherwise."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        status = "PASS" if kind is None else "FAIL"
        detail = self.detail if kind is None else f"{kind.__name__}: {exc}".splitlines()[0]
        line = f"criterion {self.number:>2} {status}  {self.title}" + (f"  [{detail}]" if detail else "")
        _ACCEPTANCE[self.number] = line
        print(line)
        return False


@pytest.fixture
def gate():
    return _Gate


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
