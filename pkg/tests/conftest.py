import random

import pytest
import sympy

from ulrich.linalg import ScalarMatrix
from ulrich.polyring import HomPoly, LinearMatrix


def sympy_vars(nvars):
    return sympy.symbols(f"x0:{nvars}")


def poly_to_sympy(p: HomPoly, xs=None):
    xs = xs or sympy_vars(p.nvars)
    expr = sympy.Integer(0)
    for m, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for x, e in zip(xs, m):
            term *= x ** e
        expr += term
    return sympy.expand(expr)


def sympy_matrix(m: ScalarMatrix):
    return sympy.Matrix(m.nrows, m.ncols,
                        lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator))


def random_linear_matrix(rng: random.Random, n: int, rows: int, cols: int, pool=(-1, 0, 1)):
    return LinearMatrix.from_coefficients(
        n, [[tuple(rng.choice(pool) for _ in range(n + 1)) for _ in range(cols)]
            for _ in range(rows)])


@pytest.fixture
def rng():
    return random.Random(20240611)


# one PASS/FAIL line per acceptance criterion in the terminal summary
_acceptance: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _acceptance.get(name, "PASS")
        _acceptance[name] = "PASS" if report.passed and prev == "PASS" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")
