import numpy as np
import pytest

from qfdesign import Design, builtin_l18

# Table 1 of the source: x1+x2+x3 = 0 mod 3 (left) and x3 = x1+x2 mod 3 (right)
LEFT_RUNS = [
    (0, 0, 0), (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 1, 1),
    (1, 2, 0), (2, 0, 1), (2, 1, 0), (2, 2, 2),
]
RIGHT_RUNS = [
    (0, 0, 0), (0, 1, 1), (0, 2, 2), (1, 0, 1), (1, 1, 2),
    (1, 2, 0), (2, 0, 2), (2, 1, 0), (2, 2, 1),
]

R2, R6 = np.sqrt(2.0), np.sqrt(6.0)

# nonzero indicator coefficients of the two designs
LEFT_COEFFS = {
    (0, 0, 0): 1 / 3,
    (1, 1, 2): R2 / 6,
    (1, 2, 1): R2 / 6,
    (2, 1, 1): R2 / 6,
    (2, 2, 2): -R2 / 6,
}
RIGHT_COEFFS = {
    (0, 0, 0): 1 / 3,
    (1, 1, 1): -R6 / 12,
    (1, 1, 2): -R2 / 12,
    (1, 2, 1): R2 / 12,
    (2, 1, 1): R2 / 12,
    (1, 2, 2): -R6 / 12,
    (2, 1, 2): -R6 / 12,
    (2, 2, 1): R6 / 12,
    (2, 2, 2): R2 / 12,
}


def make_left():
    return Design.from_runs((3, 3, 3), LEFT_RUNS)


def make_right():
    return Design.from_runs((3, 3, 3), RIGHT_RUNS)


@pytest.fixture
def left():
    return make_left()


@pytest.fixture
def right():
    return make_right()


@pytest.fixture(scope="session")
def l18():
    return builtin_l18()


def random_design(rng, levels, n=None, max_runs=12):
    if n is None:
        n = int(rng.integers(1, max_runs + 1))
    runs = np.stack([rng.integers(0, s, size=n) for s in levels], axis=1)
    return Design.from_runs(levels, runs)


def brute_multiplicity(design, x):
    return sum(1 for r in design.runs if tuple(r) == tuple(x))


# criterion -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
