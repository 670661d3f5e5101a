"""
Homogeneous-style linear systems A*v >= b with v >= 0 and b >= 0.

For such systems the sum of two solutions is a solution, and a rational
solution scaled by the common denominator is an integer one. The consistency
procedure relies on both facts to assemble one solution that is positive
wherever any solution can be.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import z3

from models.config import SolverConfig
from models.errors import ResourceExceeded

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


@dataclass(frozen=True)
class LinearSystem:
    """
    Rows of A*v >= b over non-negative unknowns.

    Attributes:
        rows: coefficient rows, each of length width
        bounds: right-hand sides, all non-negative
        width: number of unknowns
    """

    rows: Tuple[Tuple[int, ...], ...]
    bounds: Tuple[int, ...]
    width: int

    def __post_init__(self):
        if len(self.rows) != len(self.bounds):
            raise ValueError("each row needs exactly one bound")
        for row in self.rows:
            if len(row) != self.width:
                raise ValueError(f"row {row} does not have width {self.width}")
        if any(b < 0 for b in self.bounds):
            raise ValueError("bounds must be non-negative")

    def with_lower_bound(self, index: int, value: int = 1) -> "LinearSystem":
        """Copy with the extra row v[index] >= value."""
        unit = tuple(1 if i == index else 0 for i in range(self.width))
        return LinearSystem(self.rows + (unit,), self.bounds + (value,), self.width)

    def satisfied_by(self, vector: Sequence[Number]) -> bool:
        if len(vector) != self.width or any(x < 0 for x in vector):
            return False
        return all(
            sum(a * x for a, x in zip(row, vector)) >= bound
            for row, bound in zip(self.rows, self.bounds)
        )


def lin_feasible_rational(system: LinearSystem, config: Optional[SolverConfig] = None) -> Optional[Tuple[Fraction, ...]]:
    """A non-negative rational solution, or None when there is none."""
    config = config or SolverConfig()
    ctx = z3.Context()
    unknowns = [z3.Real(f"v{i}", ctx) for i in range(system.width)]
    solver = z3.Solver(ctx=ctx)
    solver.set("timeout", config.timeout_ms)
    solver.add(*[v >= 0 for v in unknowns])
    for row, bound in zip(system.rows, system.bounds):
        terms = [z3.RealVal(a, ctx) * v for a, v in zip(row, unknowns) if a != 0]
        lhs = z3.Sum(terms) if terms else z3.RealVal(0, ctx)
        solver.add(lhs >= bound)
    result = solver.check()
    if result == z3.unsat:
        return None
    if result != z3.sat:
        raise ResourceExceeded(f"linear solver gave up: {solver.reason_unknown()}", cap="timeout_ms")
    model = solver.model()
    values = []
    for v in unknowns:
        value = model.eval(v, model_completion=True)
        values.append(Fraction(value.numerator_as_long(), value.denominator_as_long()))
    return tuple(values)


def lin_integer_solution(system: LinearSystem, config: Optional[SolverConfig] = None) -> Optional[Tuple[int, ...]]:
    """Integer solution obtained by clearing denominators of a rational one."""
    rational = lin_feasible_rational(system, config)
    if rational is None:
        return None
    scale = math.lcm(*(x.denominator for x in rational)) if rational else 1
    return tuple(int(x * scale) for x in rational)


def lin_sum(first: Sequence[Number], second: Sequence[Number], system: LinearSystem) -> Tuple[Number, ...]:
    """Component-wise sum of two solutions, which is again a solution."""
    for vector in (first, second):
        if not system.satisfied_by(vector):
            raise ValueError(f"{tuple(vector)} is not a solution of the system")
    return tuple(a + b for a, b in zip(first, second))


def lin_positive_support(
    system: LinearSystem,
    indices: Iterable[int],
    config: Optional[SolverConfig] = None,
) -> Optional[Tuple[int, ...]]:
    """
    Integer solution positive at every given index.

    Sums one witness per index; None when some index admits no positive solution.
    """
    total: Tuple[int, ...] = tuple(0 for _ in range(system.width))
    for index in indices:
        witness = lin_integer_solution(system.with_lower_bound(index), config)
        if witness is None:
            logger.debug(f"No solution with unknown {index} positive")
            return None
        total = tuple(lin_sum(total, witness, system)) if system.satisfied_by(total) else witness
    if not system.satisfied_by(total):
        return lin_integer_solution(system, config)
    return tuple(int(x) for x in total)
