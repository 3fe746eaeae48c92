from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from nopurify.simplex import phase_one


def test_trivial_feasible():
    r = phase_one([[1, 1]], [1])
    assert r.feasible
    assert sum(r.x) == 1 and all(v >= 0 for v in r.x)


def test_infeasible_negative_rhs_for_nonnegative_columns():
    r = phase_one([[1, 1]], [-1])
    assert not r.feasible
    assert r.residual == 1


def test_exact_solution_is_exact():
    A = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(1)]]
    b = [Fraction(1, 3), Fraction(1, 2)]
    r = phase_one(A, b)
    assert r.feasible
    assert [sum(a * x for a, x in zip(row, r.x)) for row in A] == b


def test_redundant_rows():
    r = phase_one([[1, 1, 0], [2, 2, 0], [0, 0, 1]], [1, 2, 0])
    assert r.feasible
    assert r.x[2] == 0


def test_degenerate_problem_terminates():
    # many zero right-hand sides force degenerate pivots
    A = [[1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1], [1, 1, 1, 1]]
    r = phase_one(A, [0, 0, 0, 4])
    assert r.feasible
    assert r.x == [1, 1, 1, 1]


def test_against_scipy(rng):
    for _ in range(200):
        m, n = rng.integers(1, 6), rng.integers(1, 8)
        A = rng.integers(-3, 4, size=(m, n))
        b = rng.integers(-3, 4, size=m)
        ours = phase_one(A.tolist(), b.tolist())
        ref = linprog(np.zeros(n), A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
        assert ours.feasible == (ref.status == 0)
        if ours.feasible:
            x = np.array([float(v) for v in ours.x])
            assert np.allclose(A @ x, b)


def test_float_path_margin():
    r = phase_one([[1.0, 1.0]], [1.0])
    assert r.feasible
    with pytest.raises(RuntimeError):
        phase_one([[1.0, -1.0], [1.0, 1.0]], [0.0, 2.0], max_pivots=0)
