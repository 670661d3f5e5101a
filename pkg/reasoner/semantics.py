"""
Model-theoretic evaluation of concepts, knowledge bases and queries.

This is the reference the reasoners are audited against: it follows the
definitions directly and never looks at Venn regions.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional

from models.concepts import (
    And,
    Concept,
    ConceptName,
    ConceptVar,
    Constr,
    IndivVar,
    Not,
    Or,
    RoleVar,
    SetTerm,
    Succ,
)
from models.errors import DialectError
from models.interpretation import Interpretation
from models.knowledge_base import (
    ConceptAssertion,
    ConjunctiveQuery,
    Erc,
    ErcAnd,
    ErcOr,
    KnowledgeBase,
    RoleAssertion,
    SemiRestrictedConstraint,
)
from reasoner.qfbapa import eval_constraint
from syntax.render import render_assertion, render_concept, render_constraint

logger = logging.getLogger(__name__)


def ars(interp: Interpretation, element: int) -> FrozenSet[int]:
    """All role successors of an element."""
    result = set()
    for role in interp.roles:
        result |= interp.successors(element, role)
    return frozenset(result)


class Evaluator:
    """
    Computes concept extensions over one interpretation, memoised per concept.

    Attributes:
        interp: the interpretation
        allow_constr: whether global constraints may occur
        allow_succ: whether successor constraints may occur
    """

    def __init__(self, interp: Interpretation, allow_constr: bool = True, allow_succ: bool = True):
        self.interp = interp
        self.allow_constr = allow_constr
        self.allow_succ = allow_succ
        self.domain = frozenset(interp.domain)
        self._memo: Dict[Concept, FrozenSet[int]] = {}
        self._ars: Dict[int, FrozenSet[int]] = {}

    def successors(self, element: int) -> FrozenSet[int]:
        if element not in self._ars:
            self._ars[element] = ars(self.interp, element)
        return self._ars[element]

    def extension(self, concept: Concept) -> FrozenSet[int]:
        if concept not in self._memo:
            self._memo[concept] = self._compute(concept)
        return self._memo[concept]

    def _compute(self, concept: Concept) -> FrozenSet[int]:
        if isinstance(concept, ConceptName):
            return self.interp.extension(concept.name)
        if isinstance(concept, And):
            result = self.domain
            for operand in concept.operands:
                result = result & self.extension(operand)
            return result
        if isinstance(concept, Or):
            result = frozenset()
            for operand in concept.operands:
                result = result | self.extension(operand)
            return result
        if isinstance(concept, Not):
            return self.domain - self.extension(concept.inner)
        if isinstance(concept, Constr):
            if not self.allow_constr:
                raise DialectError("global constraint in an ALCSCC concept")
            return frozenset(d for d in self.interp.domain if self._global_holds(concept, d))
        if isinstance(concept, Succ):
            if not self.allow_succ:
                raise DialectError("successor constraint outside scc_to_pp translation")
            return frozenset(d for d in self.interp.domain if self._local_holds(concept, d))
        raise TypeError(f"not a concept: {concept!r}")

    def _individual(self, name: str) -> FrozenSet[int]:
        if name in self.interp.individuals:
            return frozenset((self.interp.individuals[name],))
        return frozenset()

    def _global_holds(self, concept: Constr, element: int) -> bool:
        def lookup(term: SetTerm) -> FrozenSet[int]:
            if isinstance(term, ConceptVar):
                return self.extension(term.concept)
            if isinstance(term, RoleVar):
                return self.interp.successors(element, term.role)
            if isinstance(term, IndivVar):
                return self._individual(term.individual)
            raise ValueError(f"unexpected set term {term!r}")

        return eval_constraint(concept.constraint, self.domain, lookup)

    def _local_holds(self, concept: Succ, element: int) -> bool:
        universe = self.successors(element)

        def lookup(term: SetTerm) -> FrozenSet[int]:
            if isinstance(term, ConceptVar):
                return self.extension(term.concept) & universe
            if isinstance(term, RoleVar):
                return self.interp.successors(element, term.role)
            if isinstance(term, IndivVar):
                return self._individual(term.individual) & universe
            raise ValueError(f"unexpected set term {term!r}")

        return eval_constraint(concept.constraint, universe, lookup)

    def count(self, concept: Concept) -> int:
        return len(self.extension(concept))


def eval_pp(interp: Interpretation, concept: Concept) -> FrozenSet[int]:
    """Extension of an ALCSCC++ concept (global constraints only)."""
    return Evaluator(interp, allow_succ=False).extension(concept)


def eval_scc(interp: Interpretation, concept: Concept) -> FrozenSet[int]:
    """Extension of an ALCSCC concept (successor constraints only)."""
    return Evaluator(interp, allow_constr=False).extension(concept)


def eval_concept(interp: Interpretation, concept: Concept) -> FrozenSet[int]:
    """Extension of a concept mixing both constraint kinds."""
    return Evaluator(interp).extension(concept)


@dataclass
class SatisfactionReport:
    """Outcome of checking an interpretation against a KB."""

    violations: List[str] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return not self.violations


def _erc_holds(evaluator: Evaluator, erc: Erc) -> bool:
    if isinstance(erc, SemiRestrictedConstraint):
        lhs = sum(n * evaluator.count(c) for n, c in erc.lhs) + erc.offset
        rhs = sum(n * evaluator.count(c) for n, c in erc.rhs)
        return lhs <= rhs
    if isinstance(erc, ErcAnd):
        return all(_erc_holds(evaluator, op) for op in erc.operands)
    if isinstance(erc, ErcOr):
        return any(_erc_holds(evaluator, op) for op in erc.operands)
    raise TypeError(f"not an ERCBox: {erc!r}")


def satisfies(interp: Interpretation, kb: KnowledgeBase) -> SatisfactionReport:
    """Check every axiom of the KB; a goal, when present, must have an instance."""
    evaluator = Evaluator(interp)
    report = SatisfactionReport()
    for assertion in kb.abox:
        names = [assertion.individual] if isinstance(assertion, ConceptAssertion) else [assertion.source, assertion.target]
        missing = [a for a in names if a not in interp.individuals]
        if missing:
            report.violations.append(f"individual {missing[0]} is not interpreted")
            continue
        if isinstance(assertion, ConceptAssertion):
            holds = interp.individuals[assertion.individual] in evaluator.extension(assertion.concept)
        else:
            edge = (interp.individuals[assertion.source], interp.individuals[assertion.target])
            present = edge in interp.role(assertion.role)
            holds = present if isinstance(assertion, RoleAssertion) else not present
        if not holds:
            report.violations.append(f"assertion {render_assertion(assertion)} fails")
    for inclusion in kb.tbox:
        outside = evaluator.extension(inclusion.sub) - evaluator.extension(inclusion.sup)
        if outside:
            report.violations.append(
                f"inclusion {render_concept(inclusion.sub)} <= {render_concept(inclusion.sup)} "
                f"fails at {interp.label(min(outside))}"
            )
    if kb.ercbox is not None and not _erc_holds(evaluator, kb.ercbox):
        report.violations.append("ERCBox fails")
    if kb.ecbox is not None:
        def lookup(term: SetTerm) -> FrozenSet[int]:
            if isinstance(term, ConceptVar):
                return evaluator.extension(term.concept)
            raise ValueError(f"unexpected set term {term!r}")

        if not eval_constraint(kb.ecbox, evaluator.domain, lookup):
            report.violations.append(f"ECBox constraint {render_constraint(kb.ecbox)} fails")
    if kb.goal is not None and not evaluator.extension(kb.goal):
        report.violations.append("goal concept has no instance")
    return report


def cq_match(interp: Interpretation, query: ConjunctiveQuery) -> Optional[Dict[str, int]]:
    """A homomorphism from the query into the interpretation, or None."""
    evaluator = Evaluator(interp)
    variables = list(query.variables)
    if not variables:
        return {}
    candidates: Dict[str, FrozenSet[int]] = {v: frozenset(interp.domain) for v in variables}
    for atom in query.concept_atoms:
        candidates[atom.variable] &= evaluator.extension(atom.concept)
    for atom in query.role_atoms:
        pairs = interp.role(atom.role)
        candidates[atom.source] &= frozenset(s for s, _ in pairs)
        candidates[atom.target] &= frozenset(t for _, t in pairs)
    if any(not c for c in candidates.values()):
        return None

    degree = {v: 0 for v in variables}
    for atom in query.role_atoms:
        degree[atom.source] += 1
        degree[atom.target] += 1
    order: List[str] = []
    remaining = set(variables)
    while remaining:
        linked = [v for v in remaining if any(
            (a.source == v and a.target in order) or (a.target == v and a.source in order) for a in query.role_atoms
        )]
        pool = linked or list(remaining)
        pick = min(pool, key=lambda v: (len(candidates[v]), -degree[v], v))
        order.append(pick)
        remaining.discard(pick)

    assignment: Dict[str, int] = {}

    def compatible(var: str) -> bool:
        for atom in query.role_atoms:
            if atom.source in assignment and atom.target in assignment and var in (atom.source, atom.target):
                if (assignment[atom.source], assignment[atom.target]) not in interp.role(atom.role):
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        var = order[i]
        for element in sorted(candidates[var]):
            assignment[var] = element
            if compatible(var) and search(i + 1):
                return True
            del assignment[var]
        return False

    return dict(assignment) if search(0) else None
