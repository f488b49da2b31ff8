"""Shared problem builders and independent reference solvers."""

from __future__ import annotations

import itertools
from fractions import Fraction
from pathlib import Path

import pytest

from posetfix import comparators as C
from posetfix.expr import Expression
from posetfix.problem import Problem
from posetfix.spaces import FiniteSpace, IntervalSpace

DATA = Path(__file__).parent / "data"

QUARTET_F = "(x - y + z - w)/8 + 1/2"
QUARTET_SEED = (0.25, 0.75, 0.25, 0.75)

# scheme rows written out by hand (0-based), independent of posetfix.problem
HAND_SCHEMES = {
    "coupled": [(0, 1), (1, 0)],
    "tripled": [(0, 1, 2), (1, 0, 1), (2, 1, 0)],
    "alternating": [(0, 1, 2, 3), (0, 3, 2, 1), (2, 1, 0, 3), (2, 3, 0, 1)],
    "cyclic": [(0, 1, 2, 3), (1, 2, 3, 0), (2, 3, 0, 1), (3, 0, 1, 2)],
}


def unit_interval(grid=21):
    return IntervalSpace(0.0, 1.0, resolution=grid)


def two_point():
    return FiniteSpace.discrete_chain((0, 1))


def expr(src, arity=4, exact=False):
    return Expression(src, ("x", "y", "z", "w")[:arity], exact=exact)


def quartet_problem(scheme="alternating", grid=21, comparator=None, seed=QUARTET_SEED):
    return Problem(
        unit_interval(grid), 4, expr(QUARTET_F), comparator or C.half(), scheme=scheme, seed=seed,
    )


def solve_affine(coeffs, const, scheme):
    """Exact solution of x_i = sum_j coeffs[j] * x[perm_i[j]] + const.

    Gauss-Jordan elimination over Fractions; returns None if singular.
    """
    n = len(coeffs)
    A = [[Fraction(0)] * n + [Fraction(const)] for _ in range(n)]
    for i, perm in enumerate(scheme):
        A[i][i] += 1
        for j, src in enumerate(perm):
            A[i][src] -= Fraction(coeffs[j])
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return tuple(A[i][n] / A[i][i] for i in range(n))


def grid_residual_argmin(F, scheme, points):
    """Brute-force grid point minimising the summed fixed-point residual."""
    best = None
    for t in itertools.product(points, repeat=len(scheme)):
        r = sum(abs(F(*(t[j] for j in perm)) - t[i]) for i, perm in enumerate(scheme))
        if best is None or r < best[0]:
            best = (r, t)
    return best


@pytest.fixture
def quartet():
    return quartet_problem()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
