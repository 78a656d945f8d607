import numpy as np
import pytest

from radiusum.metric import build_instance


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def collinear():
    return build_instance([[0.0], [1.0], [3.0]])


@pytest.fixture
def unit_square():
    return build_instance([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, detail = results[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
