"""
Reference oracles over small finite domains.

enumerate_models lists every model up to a domain size by brute force.
find_model searches the same space symbolically: interpretation bits become
z3 Booleans and every constructor is encoded straight from its semantics,
so the answer is independent of the Venn-region machinery. Any model it
returns is re-checked with semantics.satisfies.
"""

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import z3

from models.concepts import (
    And,
    CAnd,
    Card,
    CardEq,
    CardLt,
    CNot,
    COr,
    Concept,
    ConceptName,
    ConceptVar,
    Constr,
    Constraint,
    Divides,
    EmptySet,
    IndivVar,
    IntConst,
    Not,
    Or,
    PAExpr,
    RoleVar,
    ScalarMul,
    SetComp,
    SetEq,
    SetInter,
    SetSub,
    SetTerm,
    SetUnion,
    Succ,
    Sum,
    Universe,
)
from models.config import SolverConfig
from models.errors import ModelError, ResourceExceeded
from models.interpretation import Interpretation
from models.knowledge_base import (
    ConceptAssertion,
    Erc,
    ErcAnd,
    KnowledgeBase,
    RoleAssertion,
    SemiRestrictedConstraint,
)
from reasoner.semantics import satisfies

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 2_000_000


def _signature(kb: KnowledgeBase) -> Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[str, ...]]:
    return kb.concept_names(), kb.role_names(), kb.individuals()


def _candidate_count(size: int, concepts: int, roles: int, individuals: int) -> int:
    return (2 ** size) ** concepts * (2 ** (size * size)) ** roles * size ** individuals


def enumerate_models(kb: KnowledgeBase, max_size: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Interpretation]:
    """
    Every model of the KB with domain size 1..max_size.

    Sizes ascend; within a size, extensions follow lexicographic order of
    concept names, then role names, then individual placements. Raises
    ResourceExceeded before starting a size whose candidate count exceeds cap.
    """
    concepts, roles, individuals = _signature(kb)
    for size in range(1, max_size + 1):
        total = _candidate_count(size, len(concepts), len(roles), len(individuals))
        if total > cap:
            raise ResourceExceeded(
                f"{total} candidate interpretations of size {size} exceed the cap of {cap}",
                cap="oracle_size",
            )
        domain = tuple(range(size))
        subsets = [frozenset(c) for k in range(size + 1) for c in itertools.combinations(domain, k)]
        pairs = [(d, e) for d in domain for e in domain]
        edge_sets = [frozenset(c) for k in range(len(pairs) + 1) for c in itertools.combinations(pairs, k)]
        for extensions in itertools.product(subsets, repeat=len(concepts)):
            for relations in itertools.product(edge_sets, repeat=len(roles)):
                for placement in itertools.product(domain, repeat=len(individuals)):
                    interp = Interpretation(
                        domain=domain,
                        concepts=dict(zip(concepts, extensions)),
                        roles=dict(zip(roles, relations)),
                        individuals=dict(zip(individuals, placement)),
                    )
                    if satisfies(interp, kb).satisfied:
                        yield interp


class _SymbolicInterpretation:
    """z3 variables for an interpretation of fixed size, with concept encodings."""

    def __init__(self, ctx: z3.Context, size: int, concepts: Sequence[str], roles: Sequence[str], individuals: Sequence[str]):
        self.ctx = ctx
        self.size = size
        self.domain = range(size)
        self.names = {c: [z3.Bool(f"c:{c}:{d}", ctx) for d in self.domain] for c in concepts}
        self.edges = {
            r: [[z3.Bool(f"r:{r}:{d}:{e}", ctx) for e in self.domain] for d in self.domain] for r in roles
        }
        self.places = {a: z3.Int(f"i:{a}", ctx) for a in individuals}
        self._memo: Dict[Tuple[Concept, int], z3.BoolRef] = {}

    def true(self):
        return z3.BoolVal(True, self.ctx)

    def false(self):
        return z3.BoolVal(False, self.ctx)

    def count(self, bools: List) -> z3.ArithRef:
        one, zero = z3.IntVal(1, self.ctx), z3.IntVal(0, self.ctx)
        if not bools:
            return zero
        return z3.Sum([z3.If(b, one, zero) for b in bools])

    def edge_any(self, d: int, e: int):
        if not self.edges:
            return self.false()
        return z3.Or([self.edges[r][d][e] for r in self.edges])

    def holds(self, concept: Concept, d: int):
        key = (concept, d)
        if key not in self._memo:
            self._memo[key] = self._encode(concept, d)
        return self._memo[key]

    def _encode(self, concept: Concept, d: int):
        if isinstance(concept, ConceptName):
            if concept.name in self.names:
                return self.names[concept.name][d]
            return self.false()
        if isinstance(concept, And):
            return z3.And([self.holds(op, d) for op in concept.operands])
        if isinstance(concept, Or):
            return z3.Or([self.holds(op, d) for op in concept.operands])
        if isinstance(concept, Not):
            return z3.Not(self.holds(concept.inner, d))
        if isinstance(concept, Constr):
            return self.constraint(concept.constraint, d, local=False)
        if isinstance(concept, Succ):
            return self.constraint(concept.constraint, d, local=True)
        raise TypeError(f"not a concept: {concept!r}")

    def is_individual(self, name: str, e: int):
        if name not in self.places:
            return self.false()
        return self.places[name] == e

    def member(self, term: SetTerm, d: int, e: int, local: bool):
        """Whether element e belongs to the set term read at element d."""
        scope = self.edge_any(d, e) if local else self.true()
        if isinstance(term, SetUnion):
            return z3.Or(self.member(term.left, d, e, local), self.member(term.right, d, e, local))
        if isinstance(term, SetInter):
            return z3.And(self.member(term.left, d, e, local), self.member(term.right, d, e, local))
        if isinstance(term, SetComp):
            return z3.And(scope, z3.Not(self.member(term.inner, d, e, local)))
        if isinstance(term, EmptySet):
            return self.false()
        if isinstance(term, Universe):
            return scope
        if isinstance(term, RoleVar):
            return self.edges[term.role][d][e] if term.role in self.edges else self.false()
        if isinstance(term, ConceptVar):
            return z3.And(scope, self.holds(term.concept, e))
        if isinstance(term, IndivVar):
            return z3.And(scope, self.is_individual(term.individual, e))
        raise TypeError(f"unexpected set term {term!r}")

    def pa(self, expr: PAExpr, d: int, local: bool):
        if isinstance(expr, IntConst):
            return z3.IntVal(expr.value, self.ctx)
        if isinstance(expr, Card):
            return self.count([self.member(expr.term, d, e, local) for e in self.domain])
        if isinstance(expr, Sum):
            return self.pa(expr.left, d, local) + self.pa(expr.right, d, local)
        if isinstance(expr, ScalarMul):
            return z3.IntVal(expr.factor, self.ctx) * self.pa(expr.expr, d, local)
        raise TypeError(f"not a PA expression: {expr!r}")

    def constraint(self, node: Constraint, d: int, local: bool):
        if isinstance(node, CAnd):
            return z3.And(self.constraint(node.left, d, local), self.constraint(node.right, d, local))
        if isinstance(node, COr):
            return z3.Or(self.constraint(node.left, d, local), self.constraint(node.right, d, local))
        if isinstance(node, CNot):
            return z3.Not(self.constraint(node.inner, d, local))
        if isinstance(node, SetEq):
            return z3.And([self.member(node.left, d, e, local) == self.member(node.right, d, e, local) for e in self.domain])
        if isinstance(node, SetSub):
            return z3.And([
                z3.Implies(self.member(node.left, d, e, local), self.member(node.right, d, e, local))
                for e in self.domain
            ])
        if isinstance(node, CardEq):
            return self.pa(node.left, d, local) == self.pa(node.right, d, local)
        if isinstance(node, CardLt):
            return self.pa(node.left, d, local) < self.pa(node.right, d, local)
        if isinstance(node, Divides):
            return self.pa(node.expr, d, local) % node.divisor == 0
        raise TypeError(f"not a constraint: {node!r}")

    def concept_count(self, concept: Concept):
        return self.count([self.holds(concept, e) for e in self.domain])

    def erc(self, erc: Erc):
        if isinstance(erc, SemiRestrictedConstraint):
            lhs = [z3.IntVal(n, self.ctx) * self.concept_count(c) for n, c in erc.lhs] + [z3.IntVal(erc.offset, self.ctx)]
            rhs = [z3.IntVal(n, self.ctx) * self.concept_count(c) for n, c in erc.rhs] + [z3.IntVal(0, self.ctx)]
            return z3.Sum(lhs) <= z3.Sum(rhs)
        parts = [self.erc(op) for op in erc.operands]
        return z3.And(parts) if isinstance(erc, ErcAnd) else z3.Or(parts)

    def at(self, individual: str, body) -> z3.BoolRef:
        """body(d) holds at the element interpreting the individual."""
        return z3.Or([z3.And(self.places[individual] == d, body(d)) for d in self.domain])

    def kb(self, kb: KnowledgeBase) -> List:
        exprs = [z3.And(p >= 0, p < self.size) for p in self.places.values()]
        for assertion in kb.abox:
            if isinstance(assertion, ConceptAssertion):
                exprs.append(self.at(assertion.individual, lambda d, c=assertion.concept: self.holds(c, d)))
            else:
                positive = isinstance(assertion, RoleAssertion)

                def related(d, a=assertion, positive=positive):
                    edge = z3.Or([z3.And(self.places[a.target] == e, self.edges[a.role][d][e]) for e in self.domain])
                    return edge if positive else z3.Not(edge)

                exprs.append(self.at(assertion.source, related))
        for inclusion in kb.tbox:
            exprs.extend(z3.Implies(self.holds(inclusion.sub, d), self.holds(inclusion.sup, d)) for d in self.domain)
        if kb.ercbox is not None:
            exprs.append(self.erc(kb.ercbox))
        if kb.ecbox is not None:
            exprs.append(self.constraint(kb.ecbox, 0, local=False))
        if kb.goal is not None:
            exprs.append(z3.Or([self.holds(kb.goal, d) for d in self.domain]))
        return exprs

    def read(self, model: z3.ModelRef) -> Interpretation:
        def truth(b) -> bool:
            return z3.is_true(model.eval(b, model_completion=True))

        domain = tuple(self.domain)
        return Interpretation.build(
            domain=domain,
            concepts={c: [d for d in domain if truth(v[d])] for c, v in self.names.items()},
            roles={
                r: [(d, e) for d in domain for e in domain if truth(rows[d][e])]
                for r, rows in self.edges.items()
            },
            individuals={a: model.eval(p, model_completion=True).as_long() for a, p in self.places.items()},
        )


def find_model(kb: KnowledgeBase, max_size: int, config: Optional[SolverConfig] = None) -> Optional[Interpretation]:
    """Smallest-domain model of the KB up to max_size, or None when there is none."""
    config = config or SolverConfig()
    concepts, roles, individuals = _signature(kb)
    for size in range(1, max_size + 1):
        ctx = z3.Context()
        symbolic = _SymbolicInterpretation(ctx, size, concepts, roles, individuals)
        solver = z3.Solver(ctx=ctx)
        solver.set("timeout", config.timeout_ms)
        solver.add(*symbolic.kb(kb))
        result = solver.check()
        if result == z3.unsat:
            continue
        if result != z3.sat:
            raise ResourceExceeded(f"oracle solver gave up at size {size}: {solver.reason_unknown()}", cap="timeout_ms")
        interp = symbolic.read(solver.model())
        report = satisfies(interp, kb)
        if not report.satisfied:
            raise ModelError(f"oracle model fails its audit: {report.violations[0]}")
        logger.debug(f"Oracle found a model of size {size}")
        return interp
    return None


def has_model(kb: KnowledgeBase, max_size: int, config: Optional[SolverConfig] = None) -> bool:
    return find_model(kb, max_size, config) is not None


def concept_model(concept: Concept, max_size: int, config: Optional[SolverConfig] = None) -> Optional[Interpretation]:
    """Model of size <= max_size in which the concept has an instance."""
    return find_model(KnowledgeBase(goal=concept), max_size, config)
