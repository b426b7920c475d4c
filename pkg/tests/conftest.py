import warnings

import pytest

from heunps.core import FuchsWarning, HeunParameters

# Outcomes of tests/test_acceptance.py, keyed by criterion number, filled as the tests run.
ACCEPTANCE_RESULTS: dict[str, list[tuple[str, bool, str]]] = {}


def benchmark_params() -> HeunParameters:
    return HeunParameters.with_fuchs(4.5, -1.0, 1.0, -1.5, -0.14, 4.32)


def constant_params() -> HeunParameters:
    return HeunParameters(4.5, 0, 0, 0, 0, 0, 0)


def hypergeometric_params(delta=0.5) -> HeunParameters:
    # epsilon = 0 and q = alpha*beta*t: the Heun operator reduces to the Gauss one
    return HeunParameters(2.0, 1.0 * 0.5 * 2.0, 1.0, 0.5, 1.0, delta, 0.0)


@pytest.fixture
def bench_p():
    return benchmark_params()


@pytest.fixture
def const_p():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FuchsWarning)
        yield constant_params()


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FuchsWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=int):
        parts = ACCEPTANCE_RESULTS[key]
        ok = all(p for _, p, _ in parts)
        tr.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}")
        for name, passed, detail in parts:
            tr.write_line(f"    [{'pass' if passed else 'FAIL'}] {name}: {detail}")
