"""
Decision procedure for quantifier-free Boolean algebra with Presburger arithmetic.

A formula is reduced to linear integer arithmetic over Venn-region
cardinalities. Variables with scope None are global; variables sharing a
non-None scope are refined per global region, so a formula with many small
independent local groups does not pay for the product of all its variables.
Top-level set atoms prune regions before anything reaches the solver.
The arithmetic is handed to z3, each call in a fresh context.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Tuple

import z3

from models.concepts import (
    CAnd,
    Card,
    CardEq,
    CardLt,
    CNot,
    COr,
    ConceptVar,
    Constraint,
    Divides,
    EmptySet,
    IndivVar,
    IntConst,
    PAExpr,
    RoleVar,
    ScalarMul,
    SetComp,
    SetEq,
    SetInter,
    SetSub,
    SetTerm,
    SetUnion,
    SetVar,
    Sum,
    Universe,
    walk_terms,
)
from models.config import SolverConfig
from models.errors import ResourceExceeded

logger = logging.getLogger(__name__)

# Sign vector over a variable table: True means inside the variable's set.
Region = Tuple[bool, ...]


@dataclass(frozen=True)
class QfbapaFormula:
    """
    Conjunction of constraints over an ordered table of set variables.

    Attributes:
        variables: the variable table; its order fixes region sign vectors
        conjuncts: constraints, all of which must hold; empty means true
    """

    variables: Tuple[SetVar, ...]
    conjuncts: Tuple[Constraint, ...] = ()

    @classmethod
    def of(cls, conjuncts: Iterable[Constraint], variables: Optional[Iterable[SetVar]] = None) -> "QfbapaFormula":
        conjuncts = tuple(conjuncts)
        found: Dict[SetVar, None] = {}
        for conjunct in conjuncts:
            for node in walk_terms(conjunct):
                if isinstance(node, SetVar):
                    found.setdefault(node, None)
                elif isinstance(node, (RoleVar, ConceptVar, IndivVar)):
                    raise ValueError(f"QFBAPA formulas range over set variables only, found {node!r}")
        if variables is None:
            table = tuple(found)
        else:
            table = tuple(dict.fromkeys(variables))
            missing = [v for v in found if v not in set(table)]
            if missing:
                raise ValueError(f"variable {missing[0].label} is not in the variable table")
        return cls(table, conjuncts)

    def conjoin(self, *constraints: Constraint) -> "QfbapaFormula":
        extra = QfbapaFormula.of(constraints)
        return QfbapaFormula.of(self.conjuncts + tuple(constraints), self.variables + extra.variables)

    @property
    def global_variables(self) -> Tuple[SetVar, ...]:
        return tuple(v for v in self.variables if v.scope is None)

    @property
    def scopes(self) -> Tuple[Hashable, ...]:
        return tuple(dict.fromkeys(v.scope for v in self.variables if v.scope is not None))


@dataclass(frozen=True)
class Substitution:
    """Assignment of finite sets to variables over a finite universe."""

    universe: FrozenSet[int]
    sets: Mapping[SetVar, FrozenSet[int]]

    def __post_init__(self):
        for var, value in self.sets.items():
            if not value <= self.universe:
                raise ValueError(f"assignment for {var.label} is not a subset of the universe")


@dataclass
class Solution:
    """
    A satisfying assignment given by region counts and materialised elements.

    Attributes:
        variables: variable table of the solved formula
        counts: joint region -> number of elements
        elements: joint region -> element ids, consecutive from 0
    """

    variables: Tuple[SetVar, ...]
    counts: Dict[Region, int] = field(default_factory=dict)
    elements: Dict[Region, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def universe_size(self) -> int:
        return sum(self.counts.values())

    @property
    def universe(self) -> FrozenSet[int]:
        return frozenset(e for elems in self.elements.values() for e in elems)

    @property
    def support(self) -> FrozenSet[Region]:
        return frozenset(region for region, count in self.counts.items() if count > 0)

    def value(self, var: SetVar) -> FrozenSet[int]:
        index = self.variables.index(var)
        return frozenset(e for region, elems in self.elements.items() if region[index] for e in elems)

    def region_of(self, element: int) -> Region:
        for region, elems in self.elements.items():
            if element in elems:
                return region
        raise ValueError(f"element {element} not in solution")

    def substitution(self) -> Substitution:
        return Substitution(self.universe, {var: self.value(var) for var in self.variables})


# ---------------------------------------------------------------- evaluation


def eval_set_term(term: SetTerm, universe: FrozenSet, lookup: Callable[[SetTerm], FrozenSet]) -> FrozenSet:
    if isinstance(term, SetUnion):
        return eval_set_term(term.left, universe, lookup) | eval_set_term(term.right, universe, lookup)
    if isinstance(term, SetInter):
        return eval_set_term(term.left, universe, lookup) & eval_set_term(term.right, universe, lookup)
    if isinstance(term, SetComp):
        return universe - eval_set_term(term.inner, universe, lookup)
    if isinstance(term, EmptySet):
        return frozenset()
    if isinstance(term, Universe):
        return universe
    return lookup(term)


def eval_pa(expr: PAExpr, universe: FrozenSet, lookup: Callable[[SetTerm], FrozenSet]) -> int:
    if isinstance(expr, IntConst):
        return expr.value
    if isinstance(expr, Card):
        return len(eval_set_term(expr.term, universe, lookup))
    if isinstance(expr, Sum):
        return eval_pa(expr.left, universe, lookup) + eval_pa(expr.right, universe, lookup)
    if isinstance(expr, ScalarMul):
        return expr.factor * eval_pa(expr.expr, universe, lookup)
    raise TypeError(f"not a PA expression: {expr!r}")


def eval_constraint(constraint: Constraint, universe: FrozenSet, lookup: Callable[[SetTerm], FrozenSet]) -> bool:
    """Truth of a constraint once every leaf set term is resolved by lookup."""
    if isinstance(constraint, CAnd):
        return eval_constraint(constraint.left, universe, lookup) and eval_constraint(constraint.right, universe, lookup)
    if isinstance(constraint, COr):
        return eval_constraint(constraint.left, universe, lookup) or eval_constraint(constraint.right, universe, lookup)
    if isinstance(constraint, CNot):
        return not eval_constraint(constraint.inner, universe, lookup)
    if isinstance(constraint, SetEq):
        return eval_set_term(constraint.left, universe, lookup) == eval_set_term(constraint.right, universe, lookup)
    if isinstance(constraint, SetSub):
        return eval_set_term(constraint.left, universe, lookup) <= eval_set_term(constraint.right, universe, lookup)
    if isinstance(constraint, CardEq):
        return eval_pa(constraint.left, universe, lookup) == eval_pa(constraint.right, universe, lookup)
    if isinstance(constraint, CardLt):
        return eval_pa(constraint.left, universe, lookup) < eval_pa(constraint.right, universe, lookup)
    if isinstance(constraint, Divides):
        return eval_pa(constraint.expr, universe, lookup) % constraint.divisor == 0
    raise TypeError(f"not a constraint: {constraint!r}")


def eval_formula(formula: QfbapaFormula, sigma: Substitution) -> bool:
    """Truth of a formula under a substitution covering its variables."""
    for var in formula.variables:
        if var not in sigma.sets:
            raise ValueError(f"substitution does not assign {var.label}")

    def lookup(term: SetTerm) -> FrozenSet:
        if not isinstance(term, SetVar):
            raise ValueError(f"unexpected leaf {term!r}")
        return sigma.sets[term]

    return all(eval_constraint(c, sigma.universe, lookup) for c in formula.conjuncts)


# ---------------------------------------------------------------- regions


def _member(term: SetTerm, signs: Mapping[SetVar, bool]) -> bool:
    if isinstance(term, SetUnion):
        return _member(term.left, signs) or _member(term.right, signs)
    if isinstance(term, SetInter):
        return _member(term.left, signs) and _member(term.right, signs)
    if isinstance(term, SetComp):
        return not _member(term.inner, signs)
    if isinstance(term, EmptySet):
        return False
    if isinstance(term, Universe):
        return True
    return signs[term]


def _atom_holds(atom: Constraint, signs: Mapping[SetVar, bool]) -> bool:
    if isinstance(atom, SetEq):
        return _member(atom.left, signs) == _member(atom.right, signs)
    return not _member(atom.left, signs) or _member(atom.right, signs)


def _term_scope(node) -> Hashable:
    scopes = {n.scope for n in walk_terms(node) if isinstance(n, SetVar) and n.scope is not None}
    if len(scopes) > 1:
        raise ValueError("a set term may not mix variables of two local scopes")
    return next(iter(scopes), None)


def _top_level(conjuncts: Iterable[Constraint]) -> List[Constraint]:
    atoms: List[Constraint] = []
    stack = list(reversed(list(conjuncts)))
    while stack:
        node = stack.pop()
        if isinstance(node, CAnd):
            stack.extend((node.right, node.left))
        else:
            atoms.append(node)
    return atoms


@dataclass
class RegionSystem:
    """
    Venn decomposition of a formula.

    Attributes:
        formula: the decomposed formula
        global_vars: global variables in table order
        local_vars: scope -> its variables in table order
        regions: non-pruned sign vectors over global_vars
        cells: scope -> (region index, local sign vector) pairs that survive pruning
    """

    formula: QfbapaFormula
    global_vars: Tuple[SetVar, ...]
    local_vars: Dict[Hashable, Tuple[SetVar, ...]]
    regions: List[Region]
    cells: Dict[Hashable, List[Tuple[int, Region]]]

    @property
    def size(self) -> int:
        return len(self.regions) + sum(len(c) for c in self.cells.values())

    def region_signs(self, index: int) -> Dict[SetVar, bool]:
        return dict(zip(self.global_vars, self.regions[index]))

    def cell_signs(self, scope: Hashable, cell: Tuple[int, Region]) -> Dict[SetVar, bool]:
        signs = self.region_signs(cell[0])
        signs.update(zip(self.local_vars[scope], cell[1]))
        return signs

    def to_json(self) -> dict:
        def sign_text(region: Region) -> str:
            return "".join("+" if s else "-" for s in region)

        return {
            "global_variables": [v.label for v in self.global_vars],
            "regions": [sign_text(r) for r in self.regions],
            "scopes": [
                {
                    "scope": str(scope),
                    "variables": [v.label for v in self.local_vars[scope]],
                    "cells": [[index, sign_text(rho)] for index, rho in self.cells[scope]],
                }
                for scope in self.local_vars
            ],
        }


def _global_regions(
    variables: Tuple[SetVar, ...],
    atoms: List[Constraint],
    cap: int,
    within: Optional[Iterable[Region]],
) -> List[Region]:
    if within is not None:
        candidates = list(dict.fromkeys(tuple(w) for w in within))
        for region in candidates:
            if len(region) != len(variables):
                raise ValueError("candidate region does not match the global variable table")
        kept = [r for r in candidates if all(_atom_holds(a, dict(zip(variables, r))) for a in atoms)]
        if len(kept) > cap:
            raise ResourceExceeded(f"more than {cap} Venn regions", cap="max_venn_regions")
        return kept

    position = {v: i for i, v in enumerate(variables)}
    checks: Dict[int, List[Constraint]] = {}
    for atom in atoms:
        indices = [position[n] for n in walk_terms(atom) if isinstance(n, SetVar)]
        checks.setdefault(max(indices, default=-1), []).append(atom)
    if not all(_atom_holds(a, {}) for a in checks.get(-1, ())):
        return []

    results: List[Region] = []
    signs: Dict[SetVar, bool] = {}

    def extend(i: int):
        if i == len(variables):
            results.append(tuple(signs[v] for v in variables))
            if len(results) > cap:
                raise ResourceExceeded(f"more than {cap} Venn regions", cap="max_venn_regions")
            return
        for value in (True, False):
            signs[variables[i]] = value
            if all(_atom_holds(a, signs) for a in checks.get(i, ())):
                extend(i + 1)
        del signs[variables[i]]

    extend(0)
    return results


def venn_decompose(
    formula: QfbapaFormula,
    config: Optional[SolverConfig] = None,
    within: Optional[Iterable[Region]] = None,
) -> RegionSystem:
    """
    Enumerate the Venn regions that top-level set atoms leave open.

    within, when given, lists the only global regions allowed to be non-empty.
    """
    config = config or SolverConfig()
    global_vars = formula.global_variables
    local_vars: Dict[Hashable, Tuple[SetVar, ...]] = {
        scope: tuple(v for v in formula.variables if v.scope == scope) for scope in formula.scopes
    }
    global_atoms: List[Constraint] = []
    local_atoms: Dict[Hashable, List[Constraint]] = {scope: [] for scope in local_vars}
    for atom in _top_level(formula.conjuncts):
        if isinstance(atom, (SetEq, SetSub)):
            scope = _term_scope(atom)
            (global_atoms if scope is None else local_atoms[scope]).append(atom)

    regions = _global_regions(global_vars, global_atoms, config.max_venn_regions, within)
    budget = config.max_venn_regions - len(regions)
    cells: Dict[Hashable, List[Tuple[int, Region]]] = {}
    for scope, variables in local_vars.items():
        kept: List[Tuple[int, Region]] = []
        for index, region in enumerate(regions):
            base = dict(zip(global_vars, region))
            for rho in itertools.product((True, False), repeat=len(variables)):
                signs = dict(base)
                signs.update(zip(variables, rho))
                if all(_atom_holds(a, signs) for a in local_atoms[scope]):
                    kept.append((index, rho))
        budget -= len(kept)
        if budget < 0:
            raise ResourceExceeded(f"more than {config.max_venn_regions} Venn regions", cap="max_venn_regions")
        cells[scope] = kept
    system = RegionSystem(formula, global_vars, local_vars, regions, cells)
    logger.debug(f"Venn decomposition: {len(regions)} global regions, {system.size} cells in total")
    return system


# ---------------------------------------------------------------- solving


def sparse_bound(formula: QfbapaFormula, multiplier: int = 2) -> int:
    """Support size that suffices for a satisfiable formula to have a solution."""
    card_atoms = 0
    largest = 1
    for conjunct in formula.conjuncts:
        for node in walk_terms(conjunct):
            if isinstance(node, (CardEq, CardLt, Divides)):
                card_atoms += 1
            if isinstance(node, IntConst):
                largest = max(largest, abs(node.value))
            elif isinstance(node, ScalarMul):
                largest = max(largest, abs(node.factor))
            elif isinstance(node, Divides):
                largest = max(largest, node.divisor)
    bound = multiplier * (4 + card_atoms * (2 + largest.bit_length()))
    total = 2 ** len(formula.variables)
    return max(1, min(total, bound))


class _Encoder:
    """Builds the z3 arithmetic for one region system in one context."""

    def __init__(self, system: RegionSystem, ctx: z3.Context):
        self.system = system
        self.ctx = ctx
        self.region_vars = [z3.Int(f"n{i}", ctx) for i in range(len(system.regions))]
        self.cell_vars = {
            scope: [z3.Int(f"m{s}_{i}", ctx) for i in range(len(cells))]
            for s, (scope, cells) in enumerate(system.cells.items())
        }
        self._region_signs = [system.region_signs(i) for i in range(len(system.regions))]
        self._cell_signs = {
            scope: [system.cell_signs(scope, cell) for cell in cells] for scope, cells in system.cells.items()
        }

    def zero(self):
        return z3.IntVal(0, self.ctx)

    def total(self, terms: List):
        if not terms:
            return self.zero()
        return terms[0] if len(terms) == 1 else z3.Sum(terms)

    def conj(self, exprs: List):
        if not exprs:
            return z3.BoolVal(True, self.ctx)
        return exprs[0] if len(exprs) == 1 else z3.And(exprs)

    def structure(self) -> List:
        exprs = [v >= 0 for v in self.region_vars]
        for scope, cells in self.system.cells.items():
            variables = self.cell_vars[scope]
            exprs.extend(v >= 0 for v in variables)
            per_region: Dict[int, List] = {}
            for var, (index, _) in zip(variables, cells):
                per_region.setdefault(index, []).append(var)
            for index, n in enumerate(self.region_vars):
                exprs.append(self.total(per_region.get(index, [])) == n)
        return exprs

    def count(self, predicate: Callable[[Mapping[SetVar, bool]], bool], scope: Hashable):
        if scope is None:
            return self.total([n for n, signs in zip(self.region_vars, self._region_signs) if predicate(signs)])
        return self.total([m for m, signs in zip(self.cell_vars[scope], self._cell_signs[scope]) if predicate(signs)])

    def pa(self, expr: PAExpr):
        if isinstance(expr, IntConst):
            return z3.IntVal(expr.value, self.ctx)
        if isinstance(expr, Card):
            return self.count(lambda s: _member(expr.term, s), _term_scope(expr.term))
        if isinstance(expr, Sum):
            return self.pa(expr.left) + self.pa(expr.right)
        if isinstance(expr, ScalarMul):
            return z3.IntVal(expr.factor, self.ctx) * self.pa(expr.expr)
        raise TypeError(f"not a PA expression: {expr!r}")

    def constraint(self, node: Constraint):
        if isinstance(node, CAnd):
            return z3.And(self.constraint(node.left), self.constraint(node.right))
        if isinstance(node, COr):
            return z3.Or(self.constraint(node.left), self.constraint(node.right))
        if isinstance(node, CNot):
            return z3.Not(self.constraint(node.inner))
        if isinstance(node, (SetEq, SetSub)):
            violated = self.count(lambda s: not _atom_holds(node, s), _term_scope(node))
            return violated == 0
        if isinstance(node, CardEq):
            return self.pa(node.left) == self.pa(node.right)
        if isinstance(node, CardLt):
            return self.pa(node.left) < self.pa(node.right)
        if isinstance(node, Divides):
            return self.pa(node.expr) % node.divisor == 0
        raise TypeError(f"not a constraint: {node!r}")


def _run(
    system: RegionSystem,
    config: SolverConfig,
    support_limit: Optional[int] = None,
    extra: Optional[Callable[[_Encoder], List]] = None,
) -> Optional[Solution]:
    ctx = z3.Context()
    encoder = _Encoder(system, ctx)
    solver = z3.Solver(ctx=ctx)
    solver.set("timeout", config.timeout_ms)
    if config.seed is not None:
        solver.set("random_seed", config.seed)
    solver.add(*encoder.structure())
    for conjunct in system.formula.conjuncts:
        solver.add(encoder.constraint(conjunct))
    if support_limit is not None and encoder.region_vars:
        one, zero = z3.IntVal(1, ctx), encoder.zero()
        solver.add(z3.Sum([z3.If(n > 0, one, zero) for n in encoder.region_vars]) <= support_limit)
    if extra is not None:
        solver.add(*extra(encoder))
    result = solver.check()
    if result == z3.unsat:
        return None
    if result != z3.sat:
        raise ResourceExceeded(f"solver gave up: {solver.reason_unknown()}", cap="timeout_ms")
    model = solver.model()

    def value(var) -> int:
        return model.eval(var, model_completion=True).as_long()

    return _materialize(
        system,
        [value(n) for n in encoder.region_vars],
        {scope: [value(m) for m in variables] for scope, variables in encoder.cell_vars.items()},
    )


def _materialize(system: RegionSystem, region_counts: List[int], cell_counts: Dict[Hashable, List[int]]) -> Solution:
    table = system.formula.variables
    next_id = 0
    members: Dict[int, List[int]] = {}
    for index, count in enumerate(region_counts):
        members[index] = list(range(next_id, next_id + count))
        next_id += count
    local_signs: Dict[int, Dict[Hashable, Region]] = {e: {} for elems in members.values() for e in elems}
    for scope, cells in system.cells.items():
        cursor = {index: 0 for index in members}
        for (index, rho), count in zip(cells, cell_counts[scope]):
            start = cursor[index]
            for element in members[index][start:start + count]:
                local_signs[element][scope] = rho
            cursor[index] = start + count
    positions = {scope: {v: i for i, v in enumerate(variables)} for scope, variables in system.local_vars.items()}
    global_position = {v: i for i, v in enumerate(system.global_vars)}
    elements: Dict[Region, List[int]] = {}
    for index, elems in members.items():
        for element in elems:
            joint = []
            for var in table:
                if var.scope is None:
                    joint.append(system.regions[index][global_position[var]])
                else:
                    rho = local_signs[element].get(var.scope)
                    joint.append(bool(rho and rho[positions[var.scope][var]]))
            elements.setdefault(tuple(joint), []).append(element)
    return Solution(
        variables=table,
        counts={r: len(e) for r, e in elements.items()},
        elements={r: tuple(e) for r, e in elements.items()},
    )


def solve(
    formula: QfbapaFormula,
    config: Optional[SolverConfig] = None,
    *,
    max_support: Optional[int] = None,
    within: Optional[Iterable[Region]] = None,
) -> Optional[Solution]:
    """
    Decide a formula and return a materialised solution, or None when unsatisfiable.

    max_support bounds the number of non-empty global regions; when that
    restriction alone makes the formula unsatisfiable the bound is dropped
    and a warning is logged.
    """
    config = config or SolverConfig()
    system = venn_decompose(formula, config, within)
    if max_support is not None:
        solution = _run(system, config, support_limit=max_support)
        if solution is not None:
            return solution
        solution = _run(system, config)
        if solution is not None:
            logger.warning(f"Support bound {max_support} too small; solved without it")
        return solution
    return _run(system, config)


def solve_with_support(
    formula: QfbapaFormula,
    must_non_empty: Iterable[Region],
    must_empty: Iterable[Region] = (),
    config: Optional[SolverConfig] = None,
    *,
    exact: bool = False,
) -> Optional[Solution]:
    """
    Solve a formula over global variables with prescribed region occupancy.

    With exact=True, the solution's support is exactly must_non_empty.
    """
    config = config or SolverConfig()
    if formula.scopes:
        raise ValueError("support constraints apply to formulas over global variables only")
    required = list(dict.fromkeys(tuple(r) for r in must_non_empty))
    forbidden = set(tuple(r) for r in must_empty)
    if forbidden & set(required):
        return None
    system = venn_decompose(formula, config, within=required if exact else None)
    index = {region: i for i, region in enumerate(system.regions)}
    if any(region not in index for region in required):
        return None

    def extra(encoder: _Encoder) -> List:
        exprs = [encoder.region_vars[index[r]] >= 1 for r in required]
        exprs.extend(encoder.region_vars[index[r]] == 0 for r in forbidden if r in index)
        return exprs

    return _run(system, config, extra=extra)


def minimal_supports(
    formula: QfbapaFormula,
    config: Optional[SolverConfig] = None,
    *,
    within: Optional[Iterable[Region]] = None,
    max_size: Optional[int] = None,
    limit: int = 256,
) -> List[Solution]:
    """
    One solution per inclusion-minimal support, smallest supports first.

    Every solution's support contains one of the returned supports when its
    size is at most max_size. More than limit supports raises ResourceExceeded.
    """
    config = config or SolverConfig()
    if formula.scopes:
        raise ValueError("support enumeration applies to formulas over global variables only")
    system = venn_decompose(formula, config, within)
    ctx = z3.Context()
    encoder = _Encoder(system, ctx)
    solver = z3.Solver(ctx=ctx)
    solver.set("timeout", config.timeout_ms)
    if config.seed is not None:
        solver.set("random_seed", config.seed)
    solver.add(*encoder.structure())
    for conjunct in formula.conjuncts:
        solver.add(encoder.constraint(conjunct))
    occupied = [n > 0 for n in encoder.region_vars]
    one, zero = z3.IntVal(1, ctx), encoder.zero()
    size = encoder.total([z3.If(o, one, zero) for o in occupied])
    largest = len(occupied) if max_size is None else min(max_size, len(occupied))

    found: List[Solution] = []
    for k in range(largest + 1):
        solver.push()
        solver.add(size >= k)
        more = _checked(solver)
        solver.pop()
        if not more:
            break
        blocks = []
        solver.push()
        solver.add(size == k)
        while _checked(solver):
            model = solver.model()
            counts = [model.eval(n, model_completion=True).as_long() for n in encoder.region_vars]
            found.append(_materialize(system, counts, {}))
            if len(found) > limit:
                raise ResourceExceeded(f"more than {limit} minimal supports", cap="exhaustive_augmented")
            inside = [z3.Not(o) for o, c in zip(occupied, counts) if c > 0]
            if not inside:
                solver.pop()
                return found
            block = z3.Or(inside) if len(inside) > 1 else inside[0]
            blocks.append(block)
            solver.add(block)
        solver.pop()
        solver.add(*blocks)
    logger.debug(f"Found {len(found)} minimal supports over {len(system.regions)} regions")
    return found


def _checked(solver: z3.Solver) -> bool:
    result = solver.check()
    if result == z3.unsat:
        return False
    if result != z3.sat:
        raise ResourceExceeded(f"solver gave up: {solver.reason_unknown()}", cap="timeout_ms")
    return True


def describe(formula: QfbapaFormula, config: Optional[SolverConfig] = None) -> dict:
    """JSON-ready dump of a formula's Venn decomposition."""
    return venn_decompose(formula, config).to_json()
