"""
Normalisation of knowledge bases and queries.

After normalize_kb every ABox concept assertion and every ERCBox concept is a
concept name, and every TBox concept has constraint depth at most one.
Fresh names stand for the concepts they replace and are defined by a pair of
inclusions, so the result is equisatisfiable with the input and agrees with
it on the original signature.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Set, Tuple

from models.concepts import (
    And,
    Concept,
    ConceptName,
    ConceptVar,
    Constr,
    Not,
    Or,
    Succ,
    constraint_depth,
    map_constraint,
)
from models.knowledge_base import (
    ConceptAssertion,
    ConceptAtom,
    ConceptInclusion,
    ConjunctiveQuery,
    Erc,
    KnowledgeBase,
    SemiRestrictedConstraint,
)

logger = logging.getLogger(__name__)


@dataclass
class NormalizationResult:
    """
    Normalised KB plus the fresh names it introduced.

    Attributes:
        kb: the normalised knowledge base
        definitions: fresh name -> concept it abbreviates
    """

    kb: KnowledgeBase
    definitions: Dict[str, Concept] = field(default_factory=dict)


class _Namer:
    """Hands out fresh concept names, one per distinct concept."""

    def __init__(self, taken: Set[str], prefix: str = "X_"):
        self.taken = set(taken)
        self.prefix = prefix
        self.counter = 0
        self.names: Dict[Concept, str] = {}
        self.definitions: Dict[str, Concept] = {}
        self.inclusions: List[ConceptInclusion] = []

    def name_for(self, concept: Concept) -> ConceptName:
        if concept in self.names:
            return ConceptName(self.names[concept])
        while f"{self.prefix}{self.counter}" in self.taken:
            self.counter += 1
        name = f"{self.prefix}{self.counter}"
        self.counter += 1
        self.taken.add(name)
        self.names[concept] = name
        self.definitions[name] = concept
        fresh = ConceptName(name)
        # the definition itself may need flattening
        body = self.flatten(concept)
        self.inclusions.append(ConceptInclusion(fresh, body))
        self.inclusions.append(ConceptInclusion(body, fresh))
        return fresh

    def atomic(self, concept: Concept) -> Concept:
        if isinstance(concept, ConceptName):
            return concept
        return self.name_for(concept)

    def flatten(self, concept: Concept) -> Concept:
        """Rewrite to constraint depth <= 1 by naming deeper constraint arguments."""
        if isinstance(concept, And):
            return And(tuple(self.flatten(op) for op in concept.operands))
        if isinstance(concept, Or):
            return Or(tuple(self.flatten(op) for op in concept.operands))
        if isinstance(concept, Not):
            return Not(self.flatten(concept.inner))
        if isinstance(concept, (Constr, Succ)):
            def leaf(term):
                if isinstance(term, ConceptVar) and constraint_depth(term.concept) >= 1:
                    return ConceptVar(self.name_for(term.concept))
                return term

            return type(concept)(map_constraint(concept.constraint, leaf))
        return concept


def _normalize_erc(erc: Erc, namer: _Namer) -> Erc:
    if isinstance(erc, SemiRestrictedConstraint):
        return SemiRestrictedConstraint(
            tuple((n, namer.atomic(c)) for n, c in erc.lhs),
            erc.offset,
            tuple((n, namer.atomic(c)) for n, c in erc.rhs),
        )
    return type(erc)(tuple(_normalize_erc(op, namer) for op in erc.operands))


def normalize_kb(kb: KnowledgeBase, prefix: str = "X_") -> NormalizationResult:
    """Rewrite a KB into normal form; a KB already in normal form comes back unchanged."""
    namer = _Namer(set(kb.concept_names()) | set(kb.individuals()) | set(kb.role_names()), prefix)
    abox = []
    for assertion in kb.abox:
        if isinstance(assertion, ConceptAssertion):
            abox.append(ConceptAssertion(namer.atomic(assertion.concept), assertion.individual))
        else:
            abox.append(assertion)
    tbox = [ConceptInclusion(namer.flatten(ci.sub), namer.flatten(ci.sup)) for ci in kb.tbox]
    ercbox = None if kb.ercbox is None else _normalize_erc(kb.ercbox, namer)
    new_tbox = tuple(dict.fromkeys(tbox + namer.inclusions))
    normalized = replace(kb, abox=tuple(dict.fromkeys(abox)), tbox=new_tbox, ercbox=ercbox)
    if namer.definitions:
        logger.debug(f"Normalisation introduced {len(namer.definitions)} fresh names")
    return NormalizationResult(normalized, namer.definitions)


def normalize_query(query: ConjunctiveQuery, kb: KnowledgeBase, prefix: str = "Q_") -> Tuple[ConjunctiveQuery, KnowledgeBase]:
    """Replace complex concept atoms by fresh names defined in the returned KB."""
    namer = _Namer(set(kb.concept_names()) | set(kb.role_names()) | set(query.variables), prefix)
    atoms = tuple(dict.fromkeys(ConceptAtom(namer.atomic(a.concept), a.variable) for a in query.concept_atoms))
    new_query = ConjunctiveQuery(query.role_atoms, atoms)
    return new_query, kb.with_axioms(tbox=namer.inclusions)
