"""
Tests for the linear systems used by the consistency procedure.
"""

import random
from fractions import Fraction

import pytest

from reasoner.linear import (
    LinearSystem,
    lin_feasible_rational,
    lin_integer_solution,
    lin_positive_support,
    lin_sum,
)


def test_rational_solution_satisfies_system():
    system = LinearSystem(((2, -1), (-1, 3)), (1, 1), 2)
    solution = lin_feasible_rational(system)
    assert solution is not None
    assert all(isinstance(x, Fraction) for x in solution)
    assert system.satisfied_by(solution)


def test_infeasible_system():
    system = LinearSystem(((1, -1), (-1, 1)), (1, 0), 2)
    assert lin_feasible_rational(system) is None
    assert lin_integer_solution(system) is None


def test_integer_solution_clears_denominators():
    system = LinearSystem(((3, -1),), (1, ), 2)
    solution = lin_integer_solution(system)
    assert all(isinstance(x, int) for x in solution)
    assert system.satisfied_by(solution)


def test_sum_of_solutions_is_a_solution():
    system = LinearSystem(((1, -1),), (0,), 2)
    total = lin_sum((2, 1), (1, 1), system)
    assert total == (3, 2)
    with pytest.raises(ValueError):
        lin_sum((0, 1), (1, 1), system)


def test_positive_support():
    # v0 >= v1 + 1 and v2 unconstrained
    system = LinearSystem(((1, -1, 0),), (1,), 3)
    solution = lin_positive_support(system, [0, 1, 2])
    assert system.satisfied_by(solution)
    assert all(x >= 1 for x in solution)


def test_positive_support_fails_for_forced_zero():
    # v1 <= 0 once rewritten as -v1 >= 0
    system = LinearSystem(((0, -1),), (0,), 2)
    assert lin_positive_support(system, [0, 1]) is None
    assert lin_positive_support(system, [0])[0] >= 1


def test_validation():
    with pytest.raises(ValueError):
        LinearSystem(((1, 0),), (-1,), 2)
    with pytest.raises(ValueError):
        LinearSystem(((1,),), (0,), 2)
    extended = LinearSystem((), (), 2).with_lower_bound(1, 3)
    assert extended.rows == ((0, 1),)
    assert extended.bounds == (3,)


@pytest.mark.parametrize("seed", range(40))
def test_positive_support_agrees_with_search(seed):
    rng = random.Random(seed)
    rows = tuple(tuple(rng.randint(-3, 3) for _ in range(2)) for _ in range(rng.randint(1, 2)))
    system = LinearSystem(rows, tuple(rng.randint(0, 3) for _ in rows), 2)
    found = lin_positive_support(system, [0, 1])
    if found is not None:
        assert system.satisfied_by(found)
        assert min(found) >= 1
    if any(system.satisfied_by((a, b)) for a in range(1, 13) for b in range(1, 13)):
        assert found is not None


def test_scaling_turns_rational_solutions_into_integer_ones():
    system = LinearSystem(((2, -3), (-1, 2)), (1, 0), 2)
    rational = lin_feasible_rational(system)
    assert rational is not None
    integral = lin_integer_solution(system)
    assert all(isinstance(x, int) for x in integral)
    assert system.satisfied_by(integral)
