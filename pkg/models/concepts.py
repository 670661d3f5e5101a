"""
Abstract syntax for concept descriptions, set terms and cardinality constraints.

All nodes are frozen dataclasses so they hash and compare structurally; the
reasoners use concept nodes directly as dictionary keys and set-variable names.
Conjunction and disjunction are n-ary. Use conjoin/disjoin/negate to build
terms: they flatten, drop duplicates and collapse double negation.
"""

from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Optional, Tuple, Union

# Reserved concept name used to spell top as (T or not T).
TOP_NAME = "__T"


class Concept:
    """Marker base class for concept descriptions."""

    __slots__ = ()


class SetTerm:
    """Marker base class for set terms."""

    __slots__ = ()


class PAExpr:
    """Marker base class for Presburger (integer) expressions."""

    __slots__ = ()


class Constraint:
    """Marker base class for cardinality constraints."""

    __slots__ = ()


# ---------------------------------------------------------------- concepts


@dataclass(frozen=True)
class ConceptName(Concept):
    name: str


@dataclass(frozen=True)
class And(Concept):
    operands: Tuple[Concept, ...]


@dataclass(frozen=True)
class Or(Concept):
    operands: Tuple[Concept, ...]


@dataclass(frozen=True)
class Not(Concept):
    inner: Concept


@dataclass(frozen=True)
class Constr(Concept):
    """Global constraint: holds at d when the constraint holds over the whole domain, roles read at d."""

    constraint: Constraint


@dataclass(frozen=True)
class Succ(Concept):
    """Local constraint: holds at d when the constraint holds over the role successors of d."""

    constraint: Constraint


# ---------------------------------------------------------------- set terms


@dataclass(frozen=True)
class EmptySet(SetTerm):
    pass


@dataclass(frozen=True)
class Universe(SetTerm):
    pass


@dataclass(frozen=True)
class RoleVar(SetTerm):
    role: str


@dataclass(frozen=True)
class ConceptVar(SetTerm):
    concept: Concept


@dataclass(frozen=True)
class IndivVar(SetTerm):
    individual: str


@dataclass(frozen=True)
class SetVar(SetTerm):
    """
    Plain set variable of a QFBAPA formula.

    Attributes:
        key: hashable identity of the variable
        scope: None for a global variable, otherwise the local scope it lives in
    """

    key: Hashable
    scope: Hashable = None

    @property
    def label(self) -> str:
        base = self.key if isinstance(self.key, str) else "_".join(str(part) for part in _flatten_key(self.key))
        return base if self.scope is None else f"{base}@{self.scope}"


@dataclass(frozen=True)
class SetUnion(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class SetInter(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class SetComp(SetTerm):
    inner: SetTerm


EMPTY = EmptySet()
UNIV = Universe()


# ---------------------------------------------------------------- PA expressions


@dataclass(frozen=True)
class IntConst(PAExpr):
    value: int


@dataclass(frozen=True)
class Card(PAExpr):
    term: SetTerm


@dataclass(frozen=True)
class Sum(PAExpr):
    left: PAExpr
    right: PAExpr


@dataclass(frozen=True)
class ScalarMul(PAExpr):
    factor: int
    expr: PAExpr


# ---------------------------------------------------------------- constraints


@dataclass(frozen=True)
class SetEq(Constraint):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class SetSub(Constraint):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class CardEq(Constraint):
    left: PAExpr
    right: PAExpr


@dataclass(frozen=True)
class CardLt(Constraint):
    left: PAExpr
    right: PAExpr


@dataclass(frozen=True)
class Divides(Constraint):
    divisor: int
    expr: PAExpr

    def __post_init__(self):
        if self.divisor <= 0:
            raise ValueError(f"divisor must be positive, got {self.divisor}")


@dataclass(frozen=True)
class CAnd(Constraint):
    left: Constraint
    right: Constraint


@dataclass(frozen=True)
class COr(Constraint):
    left: Constraint
    right: Constraint


@dataclass(frozen=True)
class CNot(Constraint):
    inner: Constraint


SetAtom = Union[SetEq, SetSub]


# ---------------------------------------------------------------- builders


def _flatten_key(key) -> Iterator:
    if isinstance(key, tuple):
        for part in key:
            yield from _flatten_key(part)
    elif isinstance(key, Concept):
        from syntax.render import render_concept

        yield render_concept(key)
    else:
        yield key


def top() -> Concept:
    name = ConceptName(TOP_NAME)
    return Or((name, Not(name)))


def bottom() -> Concept:
    name = ConceptName(TOP_NAME)
    return And((name, Not(name)))


def is_top(concept: Concept) -> bool:
    return concept == top()


def is_bottom(concept: Concept) -> bool:
    return concept == bottom()


def negate(concept: Concept) -> Concept:
    """Negation with double negation collapsed."""
    if isinstance(concept, Not):
        return concept.inner
    return Not(concept)


def _nary(kind, concepts: Iterable[Concept]) -> Tuple[Concept, ...]:
    seen = []
    for concept in concepts:
        parts = concept.operands if isinstance(concept, kind) else (concept,)
        for part in parts:
            if part not in seen:
                seen.append(part)
    return tuple(seen)


def conjoin(*concepts: Concept) -> Concept:
    operands = _nary(And, concepts)
    if not operands:
        return top()
    if len(operands) == 1:
        return operands[0]
    return And(operands)


def disjoin(*concepts: Concept) -> Concept:
    operands = _nary(Or, concepts)
    if not operands:
        return bottom()
    if len(operands) == 1:
        return operands[0]
    return Or(operands)


def union_all(terms: Iterable[SetTerm]) -> SetTerm:
    result: Optional[SetTerm] = None
    for term in terms:
        result = term if result is None else SetUnion(result, term)
    return EMPTY if result is None else result


def inter_all(terms: Iterable[SetTerm]) -> SetTerm:
    result: Optional[SetTerm] = None
    for term in terms:
        result = term if result is None else SetInter(result, term)
    return UNIV if result is None else result


def sum_all(exprs: Iterable[PAExpr]) -> PAExpr:
    result: Optional[PAExpr] = None
    for expr in exprs:
        result = expr if result is None else Sum(result, expr)
    return IntConst(0) if result is None else result


def constraint_all(constraints: Iterable[Constraint]) -> Optional[Constraint]:
    result: Optional[Constraint] = None
    for constraint in constraints:
        result = constraint if result is None else CAnd(result, constraint)
    return result


def at_most(expr: PAExpr, bound: PAExpr) -> Constraint:
    """expr <= bound, spelled as not (bound < expr)."""
    return CNot(CardLt(bound, expr))


def at_least(expr: PAExpr, bound: PAExpr) -> Constraint:
    """expr >= bound, spelled as not (expr < bound)."""
    return CNot(CardLt(expr, bound))


def concept_names(concept: Concept) -> Iterator[str]:
    """Concept names occurring in a concept, in first-occurrence order, reserved name included."""
    for node in walk_concept(concept):
        if isinstance(node, ConceptName):
            yield node.name


def walk_concept(concept: Concept) -> Iterator[Concept]:
    """Pre-order walk over a concept and every concept nested inside its constraints."""
    yield concept
    if isinstance(concept, (And, Or)):
        for operand in concept.operands:
            yield from walk_concept(operand)
    elif isinstance(concept, Not):
        yield from walk_concept(concept.inner)
    elif isinstance(concept, (Constr, Succ)):
        for inner in constraint_concepts(concept.constraint):
            yield from walk_concept(inner)


def walk_terms(node) -> Iterator:
    """Every set term and PA expression inside a constraint, set term or PA expression."""
    if isinstance(node, (CAnd, COr)):
        yield from walk_terms(node.left)
        yield from walk_terms(node.right)
    elif isinstance(node, CNot):
        yield from walk_terms(node.inner)
    elif isinstance(node, (SetEq, SetSub, CardEq, CardLt, SetUnion, SetInter, Sum)):
        yield node
        yield from walk_terms(node.left)
        yield from walk_terms(node.right)
    elif isinstance(node, Divides):
        yield node
        yield from walk_terms(node.expr)
    elif isinstance(node, ScalarMul):
        yield node
        yield from walk_terms(node.expr)
    elif isinstance(node, Card):
        yield node
        yield from walk_terms(node.term)
    elif isinstance(node, SetComp):
        yield node
        yield from walk_terms(node.inner)
    else:
        yield node


def constraint_concepts(constraint: Constraint) -> Iterator[Concept]:
    """Concepts appearing as set variables in a constraint, in order, without descending into them."""
    for node in walk_terms(constraint):
        if isinstance(node, ConceptVar):
            yield node.concept


def constraint_roles(constraint: Constraint) -> Iterator[str]:
    for node in walk_terms(constraint):
        if isinstance(node, RoleVar):
            yield node.role


def concept_roles(concept: Concept) -> Iterator[str]:
    """Role names used anywhere in a concept."""
    for node in walk_concept(concept):
        if isinstance(node, (Constr, Succ)):
            yield from constraint_roles(node.constraint)


def map_constraint(constraint: Constraint, leaf) -> Constraint:
    """Rebuild a constraint with every leaf set term replaced by leaf(term)."""

    def term(node: SetTerm) -> SetTerm:
        if isinstance(node, SetUnion):
            return SetUnion(term(node.left), term(node.right))
        if isinstance(node, SetInter):
            return SetInter(term(node.left), term(node.right))
        if isinstance(node, SetComp):
            return SetComp(term(node.inner))
        return leaf(node)

    def pa(node: PAExpr) -> PAExpr:
        if isinstance(node, Card):
            return Card(term(node.term))
        if isinstance(node, Sum):
            return Sum(pa(node.left), pa(node.right))
        if isinstance(node, ScalarMul):
            return ScalarMul(node.factor, pa(node.expr))
        return node

    def walk(node: Constraint) -> Constraint:
        if isinstance(node, CAnd):
            return CAnd(walk(node.left), walk(node.right))
        if isinstance(node, COr):
            return COr(walk(node.left), walk(node.right))
        if isinstance(node, CNot):
            return CNot(walk(node.inner))
        if isinstance(node, SetEq):
            return SetEq(term(node.left), term(node.right))
        if isinstance(node, SetSub):
            return SetSub(term(node.left), term(node.right))
        if isinstance(node, CardEq):
            return CardEq(pa(node.left), pa(node.right))
        if isinstance(node, CardLt):
            return CardLt(pa(node.left), pa(node.right))
        if isinstance(node, Divides):
            return Divides(node.divisor, pa(node.expr))
        raise TypeError(f"not a constraint: {node!r}")

    return walk(constraint)


def constraint_depth(concept: Concept) -> int:
    """Nesting depth of Constr/Succ constructors."""
    if isinstance(concept, (And, Or)):
        return max(constraint_depth(operand) for operand in concept.operands)
    if isinstance(concept, Not):
        return constraint_depth(concept.inner)
    if isinstance(concept, (Constr, Succ)):
        inner = [constraint_depth(c) for c in constraint_concepts(concept.constraint)]
        return 1 + max(inner, default=0)
    return 0
