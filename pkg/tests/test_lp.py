"""Exact simplex sanity: known instances plus a float cross-check vs scipy."""

import random
from fractions import Fraction

import numpy as np
import pytest
import scipy.optimize

from oscdecay.lp import lp_feasible, lp_solve

F = Fraction


def test_known_optimum():
    # min -x - y  s.t. x + y + s = 1 -> optimum -1 on the simplex edge
    status, x, value = lp_solve([F(-1), F(-1), F(0)], [[F(1), F(1), F(1)]], [F(1)])
    assert status == "optimal"
    assert value == -1


def test_infeasible():
    # x + y = -1 with x, y >= 0 is infeasible (rhs sign handled internally)
    status, _, _ = lp_solve([F(0), F(0)], [[F(1), F(1)], [F(1), F(1)]], [F(1), F(2)])
    assert status == "infeasible"


def test_unbounded():
    # min -x s.t. x - s = 0: x free to grow
    status, _, _ = lp_solve([F(-1), F(0)], [[F(1), F(-1)]], [F(0)])
    assert status == "unbounded"


def test_feasibility_simplex_membership():
    # (1/2, 1/2) is a convex combination of (1,0) and (0,1)
    A = [[F(1), F(0)], [F(0), F(1)], [F(1), F(1)]]
    assert lp_feasible(A, [F(1, 2), F(1, 2), F(1)])
    assert not lp_feasible(A, [F(2), F(0), F(1)])


def test_against_scipy_on_random_instances():
    rng = random.Random(42)
    checked = 0
    for _ in range(60):
        m, n = rng.randint(1, 4), rng.randint(2, 6)
        A = [[F(rng.randint(-4, 4)) for _ in range(n)] for _ in range(m)]
        b = [F(rng.randint(0, 6)) for _ in range(m)]
        c = [F(rng.randint(-5, 5)) for _ in range(n)]
        status, x, value = lp_solve(c, A, b)
        res = scipy.optimize.linprog(
            [float(v) for v in c],
            A_eq=np.array(A, dtype=float),
            b_eq=np.array(b, dtype=float),
            bounds=[(0, None)] * n,
            method="highs",
        )
        if status == "optimal":
            assert res.status == 0
            assert float(value) == pytest.approx(res.fun, rel=1e-9, abs=1e-9)
            # exact solution satisfies the constraints exactly
            for row, rhs in zip(A, b):
                assert sum(r * v for r, v in zip(row, x)) == rhs
            checked += 1
        elif status == "infeasible":
            assert res.status == 2
        else:
            assert res.status == 3
    assert checked >= 10
