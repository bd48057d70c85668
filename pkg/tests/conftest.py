import numpy as np
import pytest

from autoqec.codes import build_corrupted_structure, builtin_code
from autoqec.synthesis import synthesize

_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(label, ok, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label} {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def binomial():
    code, errors = builtin_code("binomial_04_2_loss")
    cs = build_corrupted_structure(code, errors)
    return code, errors, cs, synthesize(cs)


@pytest.fixture(scope="session")
def repetition():
    code, errors = builtin_code("repetition3_bitflip")
    cs = build_corrupted_structure(code, errors)
    return code, errors, cs, synthesize(cs)


def random_density(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = z @ z.conj().T
    return rho / np.trace(rho)
