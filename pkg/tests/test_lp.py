from fractions import Fraction as F

import pytest

from gameminer.errors import DimensionError
from gameminer.lp import (
    EQ, GE, INFEASIBLE, LE, MANY, NONE, UNBOUNDED, UNIQUE,
    Constraint, LinearProgram, gauss_solve, solve_lp,
)


def test_two_variable_max():
    lp = LinearProgram((1, 1), (((1, 2), LE, 4), ((3, 1), LE, 6)))
    res = solve_lp(lp)
    assert res.optimal
    assert res.value == F(14, 5)
    assert res.point == (F(8, 5), F(6, 5))


def test_infeasible():
    lp = LinearProgram((1,), (((1,), GE, 2), ((1,), LE, 1)))
    assert solve_lp(lp).status == INFEASIBLE


def test_unbounded():
    assert solve_lp(LinearProgram((1,))).status == UNBOUNDED


def test_free_variable_min():
    lp = LinearProgram((1,), (((1,), GE, -3),), "min", ((None, None),))
    res = solve_lp(lp)
    assert res.value == -3


def test_bounded_variable():
    lp = LinearProgram((1, -1), (), "max", ((F(1, 2), 2), (-1, None)))
    res = solve_lp(lp)
    assert res.point == (2, -1)
    assert res.value == 3


def test_redundant_equalities():
    lp = LinearProgram((1, 0), (((1, 1), EQ, 1), ((2, 2), EQ, 2)))
    res = solve_lp(lp)
    assert res.value == 1
    assert all(c.holds(res.point) for c in lp.constraints)


def test_constraint_holds():
    c = Constraint((1, -1), GE, 0)
    assert c.holds((F(1, 2), F(1, 3)))
    assert not c.holds((0, 1))
    with pytest.raises(ValueError):
        Constraint((1,), "<", 0)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        LinearProgram((1, 1), (((1,), LE, 1),))
    with pytest.raises(ValueError):
        LinearProgram((1,), (), "maximize")


def test_gauss_solve_cases():
    assert gauss_solve([[1, 1], [1, -1]], [2, 0]) == (UNIQUE, (1, 1))
    assert gauss_solve([[1, 1], [1, 1]], [1, 2]) == (NONE, None)
    status, z = gauss_solve([[1, 1], [2, 2]], [1, 2])
    assert status == MANY
    assert z == (1, 0)
